#pragma once
// Conversions between nnbench types and the flat plugin ABI.

#include "nnbench/backend.hpp"
#include "nnbench/backend_abi.h"

namespace nnbench::detail {

/// View of `t` for the ABI; data is shared, not copied.
nnb_tensor to_abi(const Tensor& t);
BackendDescriptor descriptor_from_caps(const nnb_capabilities& caps);
nnb_capabilities caps_from_descriptor(const BackendDescriptor& d);

}  // namespace nnbench::detail
