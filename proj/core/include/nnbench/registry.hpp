#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nnbench/layer.hpp"
#include "nnbench/network.hpp"

namespace nnbench {

inline constexpr std::string_view kRegistryVersion = "1";

struct MicroConfig {
  ConfigClass cls;
  LayerSpec spec;
  std::string source;  ///< "network/layer" for configs copied from a network
};

/// Seven configurations per kind: A-C copied from shipped networks, D a
/// minimal stress case, E-G extreme large.
std::vector<MicroConfig> config_table(LayerKind kind);
/// Throws SpecError naming the kind when it is unknown.
std::vector<MicroConfig> config_table(std::string_view kind_name);
MicroConfig micro_config(LayerKind kind, char label);
/// "conv/A", "pool_max/F", ...
std::string micro_id(LayerKind kind, char label);

// Macrobenchmark networks.
NetworkDescriptor lenet5();
NetworkDescriptor rnn();
NetworkDescriptor alexnet();
NetworkDescriptor vgg16();
NetworkDescriptor resnet50();
NetworkDescriptor faster_rcnn();
NetworkDescriptor deepface();
NetworkDescriptor deconvnet();
NetworkDescriptor fcln();
NetworkDescriptor s2vt();
NetworkDescriptor syntaxnet();
/// Small executable two-layer LSTM network (not one of the eleven).
NetworkDescriptor lstm2();

/// Per-layer pruned densities for the sparse LeNet-5, AlexNet and VGG-16.
NetworkDescriptor sparse_variant(const NetworkDescriptor& dense);
/// Same network with every layer tagged fx16.
NetworkDescriptor fx16_variant(const NetworkDescriptor& dense);

/// The eleven macrobenchmarks.
std::vector<NetworkDescriptor> macro_networks();
/// The eleven plus the sparse LeNet-5, AlexNet and VGG-16 (clustering set).
std::vector<NetworkDescriptor> macro_suite();
/// Every shipped descriptor: macro_suite() plus lstm2.
std::vector<NetworkDescriptor> all_networks();
std::vector<NetworkDescriptor> executable_networks();
NetworkDescriptor find_network(std::string_view name);

}  // namespace nnbench
