#include "reuse_oracle.hpp"

#include <algorithm>

namespace oracle {

std::vector<std::optional<std::uint64_t>> reuse_by_definition(std::span<const std::uint64_t> addrs) {
  // Dense ids first so the scan can use flat arrays.
  std::vector<std::uint64_t> keys(addrs.begin(), addrs.end());
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  std::vector<std::size_t> id(addrs.size());
  for (std::size_t i = 0; i < addrs.size(); ++i)
    id[i] = static_cast<std::size_t>(std::lower_bound(keys.begin(), keys.end(), addrs[i]) - keys.begin());

  constexpr std::size_t kNever = static_cast<std::size_t>(-1);
  std::vector<std::size_t> last(keys.size(), kNever);
  std::vector<std::size_t> stamp(keys.size(), 0);  // i + 1 once counted for access i
  std::vector<std::optional<std::uint64_t>> out(addrs.size());
  for (std::size_t i = 0; i < addrs.size(); ++i) {
    if (last[id[i]] != kNever) {
      std::uint64_t distinct = 0;
      for (std::size_t j = last[id[i]] + 1; j < i; ++j) {
        if (stamp[id[j]] != i + 1) {
          stamp[id[j]] = i + 1;
          ++distinct;
        }
      }
      out[i] = distinct;
    }
    last[id[i]] = i;
  }
  return out;
}

}  // namespace oracle
