#pragma once
// Out-of-process backend protocol. Every message on the pipe is
//   u32 length (of type + payload), u8 type, payload
// with all integers little-endian. Payload layouts are in docs/backend-abi.md.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nnbench/backend.hpp"

namespace nnbench::worker {

enum class MsgType : std::uint8_t {
  hello = 0x01,    // host -> worker, empty payload
  forward = 0x02,  // host -> worker
  fused = 0x03,    // host -> worker
  bye = 0x04,      // host -> worker, empty payload
  caps = 0x81,     // worker -> host: descriptor JSON text
  result = 0x82,   // worker -> host
  ok = 0x84,       // worker -> host, reply to bye
  error = 0xFF,    // worker -> host: u8 code (1 unsupported, 2 error), message text
};

struct Message {
  MsgType type = MsgType::hello;
  std::vector<std::uint8_t> payload;
};

/// Throws BackendError on short writes.
void write_message(int fd, const Message& m);
/// nullopt on clean EOF before a header; throws on truncated messages.
std::optional<Message> read_message(int fd);

class PayloadWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void text(const std::string& s);  ///< u32 length + bytes
  void tensor(const Tensor& t);     ///< u32 rank, u64 dims, fp32 data
  void switches(const PoolSwitches* s);  ///< u8 present, [u64 count, u64 indices]
  std::vector<std::uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

class PayloadReader {
 public:
  explicit PayloadReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  std::string text();
  Tensor tensor();
  std::optional<PoolSwitches> switches();
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> take(std::size_t n);
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

/// Worker main loop: answers requests on in_fd/out_fd until bye or EOF.
/// Returns a process exit code.
int serve(Backend& backend, int in_fd, int out_fd);

}  // namespace nnbench::worker
