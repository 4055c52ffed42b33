#include "nnbench/worker.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "nnbench/error.hpp"

extern char** environ;

namespace nnbench::worker {

namespace {

void write_all(int fd, const std::uint8_t* p, std::size_t n) {
  while (n > 0) {
    const ssize_t w = ::write(fd, p, n);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw BackendError(std::string("worker pipe write failed: ") + std::strerror(errno));
    }
    p += w;
    n -= static_cast<std::size_t>(w);
  }
}

// Returns bytes read; less than n only at EOF.
std::size_t read_all(int fd, std::uint8_t* p, std::size_t n) {
  std::size_t got = 0;
  while (got < n) {
    const ssize_t r = ::read(fd, p + got, n - got);
    if (r < 0) {
      if (errno == EINTR) continue;
      throw BackendError(std::string("worker pipe read failed: ") + std::strerror(errno));
    }
    if (r == 0) break;
    got += static_cast<std::size_t>(r);
  }
  return got;
}

void put_le(std::vector<std::uint8_t>& b, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(std::span<const std::uint8_t> s) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < s.size(); ++i) v |= static_cast<std::uint64_t>(s[i]) << (8 * i);
  return v;
}

}  // namespace

void write_message(int fd, const Message& m) {
  const std::uint64_t len = m.payload.size() + 1;
  if (len > 0xFFFFFFFFULL) throw BackendError("worker message exceeds 4 GiB");
  std::vector<std::uint8_t> head;
  put_le(head, len, 4);
  head.push_back(static_cast<std::uint8_t>(m.type));
  write_all(fd, head.data(), head.size());
  write_all(fd, m.payload.data(), m.payload.size());
}

std::optional<Message> read_message(int fd) {
  std::uint8_t head[5];
  const std::size_t got = read_all(fd, head, 5);
  if (got == 0) return std::nullopt;
  if (got < 5) throw BackendError("worker pipe: truncated header");
  const std::uint64_t len = get_le({head, 4});
  if (len == 0) throw BackendError("worker pipe: zero-length message");
  Message m;
  m.type = static_cast<MsgType>(head[4]);
  m.payload.resize(len - 1);
  if (read_all(fd, m.payload.data(), m.payload.size()) != m.payload.size()) {
    throw BackendError("worker pipe: truncated payload");
  }
  return m;
}

void PayloadWriter::u32(std::uint32_t v) { put_le(buf_, v, 4); }
void PayloadWriter::u64(std::uint64_t v) { put_le(buf_, v, 8); }

void PayloadWriter::text(const std::string& s) {
  u32(static_cast<std::uint32_t>(s.size()));
  buf_.insert(buf_.end(), s.begin(), s.end());
}

void PayloadWriter::tensor(const Tensor& t) {
  u32(static_cast<std::uint32_t>(t.shape.rank()));
  for (auto d : t.shape.dims()) u64(d);
  for (float f : t.data) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    u32(bits);
  }
}

void PayloadWriter::switches(const PoolSwitches* s) {
  u8(s ? 1 : 0);
  if (!s) return;
  u64(s->index.size());
  for (auto i : s->index) u64(i);
}

std::span<const std::uint8_t> PayloadReader::take(std::size_t n) {
  if (bytes_.size() - pos_ < n) throw BackendError("worker payload truncated");
  auto s = bytes_.subspan(pos_, n);
  pos_ += n;
  return s;
}

std::uint8_t PayloadReader::u8() { return take(1)[0]; }
std::uint32_t PayloadReader::u32() { return static_cast<std::uint32_t>(get_le(take(4))); }
std::uint64_t PayloadReader::u64() { return get_le(take(8)); }

std::string PayloadReader::text() {
  const auto n = u32();
  auto s = take(n);
  return std::string(s.begin(), s.end());
}

Tensor PayloadReader::tensor() {
  const auto rank = u32();
  if (rank == 0 || rank > 8) throw BackendError("worker payload: bad tensor rank");
  std::vector<std::uint64_t> dims(rank);
  for (auto& d : dims) d = u64();
  Tensor t{TensorShape(dims)};
  auto raw = take(t.size() * 4);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto bits = static_cast<std::uint32_t>(get_le(raw.subspan(i * 4, 4)));
    std::memcpy(&t.data[i], &bits, 4);
  }
  return t;
}

std::optional<PoolSwitches> PayloadReader::switches() {
  if (u8() == 0) return std::nullopt;
  PoolSwitches s;
  s.index.resize(u64());
  for (auto& i : s.index) i = u64();
  return s;
}

// ---- server -----------------------------------------------------------------------

namespace {

LayerParams read_params(PayloadReader& r, const LayerSpec& spec, std::uint32_t count) {
  const auto layout = param_layout(spec);
  LayerParams p;
  for (std::uint32_t i = 0; i < count; ++i) {
    ParamTensor t;
    if (i < layout.size()) {
      t.name = layout[i].name;
      t.role = layout[i].role;
    }
    t.value = r.tensor();
    p.tensors.push_back(std::move(t));
  }
  return p;
}

Message error_message(std::uint8_t code, const std::string& what) {
  PayloadWriter w;
  w.u8(code);
  w.text(what);
  return {MsgType::error, w.take()};
}

}  // namespace

int serve(Backend& backend, int in_fd, int out_fd) {
  while (true) {
    std::optional<Message> m;
    try {
      m = read_message(in_fd);
    } catch (const std::exception&) {
      return 1;
    }
    if (!m || m->type == MsgType::bye) {
      if (m) write_message(out_fd, {MsgType::ok, {}});
      return 0;
    }
    Message reply;
    try {
      PayloadReader r(m->payload);
      switch (m->type) {
        case MsgType::hello: {
          const std::string js = to_json(backend.descriptor()).dump();
          reply = {MsgType::caps, std::vector<std::uint8_t>(js.begin(), js.end())};
          break;
        }
        case MsgType::forward: {
          const LayerSpec spec = layer_from_json(nlohmann::json::parse(r.text()), "layer");
          const LayerParams params = read_params(r, spec, r.u32());
          const Tensor input = r.tensor();
          const auto sw = r.switches();
          const LayerOutput out = backend.forward(spec, params, input, sw ? &*sw : nullptr);
          PayloadWriter w;
          w.tensor(out.output);
          w.switches(out.switches ? &*out.switches : nullptr);
          reply = {MsgType::result, w.take()};
          break;
        }
        case MsgType::fused: {
          const auto arr = nlohmann::json::parse(r.text());
          std::vector<LayerSpec> specs;
          for (std::size_t i = 0; i < arr.size(); ++i) {
            specs.push_back(layer_from_json(arr[i], "layers[" + std::to_string(i) + "]"));
          }
          const auto n = r.u32();
          if (n != specs.size()) throw BackendError("fused: layer count mismatch");
          std::vector<std::uint32_t> counts(n);
          for (auto& c : counts) c = r.u32();
          std::vector<LayerParams> params;
          for (std::uint32_t i = 0; i < n; ++i) params.push_back(read_params(r, specs[i], counts[i]));
          const Tensor input = r.tensor();
          const Tensor out = backend.forward_fused(specs, params, input);
          PayloadWriter w;
          w.tensor(out);
          w.switches(nullptr);
          reply = {MsgType::result, w.take()};
          break;
        }
        default:
          reply = error_message(2, "unknown message type");
      }
    } catch (const CapabilityError& e) {
      reply = error_message(1, e.what());
    } catch (const std::exception& e) {
      reply = error_message(2, e.what());
    }
    write_message(out_fd, reply);
  }
}

// ---- client ------------------------------------------------------------------------

namespace {

class WorkerBackend final : public Backend {
 public:
  WorkerBackend(const std::filesystem::path& exe, const std::string& inner) {
    std::signal(SIGPIPE, SIG_IGN);
    int to_child[2], from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0) throw BackendError("worker: pipe() failed");
    posix_spawn_file_actions_t fa;
    posix_spawn_file_actions_init(&fa);
    posix_spawn_file_actions_adddup2(&fa, to_child[0], 0);
    posix_spawn_file_actions_adddup2(&fa, from_child[1], 1);
    posix_spawn_file_actions_addclose(&fa, to_child[1]);
    posix_spawn_file_actions_addclose(&fa, from_child[0]);
    const std::string exe_s = exe.string();
    std::vector<char*> argv = {const_cast<char*>(exe_s.c_str()), const_cast<char*>(inner.c_str()), nullptr};
    const int rc = posix_spawn(&pid_, exe_s.c_str(), &fa, nullptr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&fa);
    ::close(to_child[0]);
    ::close(from_child[1]);
    out_ = to_child[1];
    in_ = from_child[0];
    if (rc != 0) {
      cleanup();
      throw BackendError("worker: cannot start " + exe_s + ": " + std::strerror(rc));
    }
    try {
      const Message caps = roundtrip({MsgType::hello, {}}, MsgType::caps);
      desc_ = backend_descriptor_from_json(nlohmann::json::parse(caps.payload.begin(), caps.payload.end()));
      desc_.name = "worker:" + desc_.name;
    } catch (...) {
      cleanup();
      throw;
    }
  }

  ~WorkerBackend() override {
    try {
      write_message(out_, {MsgType::bye, {}});
      read_message(in_);
    } catch (...) {
    }
    cleanup();
  }

  const BackendDescriptor& descriptor() const override { return desc_; }

  LayerOutput forward(const LayerSpec& spec, const LayerParams& params, const Tensor& input,
                      const PoolSwitches* switches) override {
    if (!desc_.supports(spec.kind)) {
      throw CapabilityError(desc_.name + ": unsupported kind " + std::string(to_string(spec.kind)));
    }
    PayloadWriter w;
    w.text(to_json(spec).dump());
    w.u32(static_cast<std::uint32_t>(params.size()));
    for (std::size_t i = 0; i < params.size(); ++i) w.tensor(params[i]);
    w.tensor(input);
    w.switches(switches);
    const Message m = roundtrip({MsgType::forward, w.take()}, MsgType::result);
    PayloadReader r(m.payload);
    LayerOutput out;
    out.output = r.tensor();
    out.switches = r.switches();
    return out;
  }

  Tensor forward_fused(std::span<const LayerSpec> specs, std::span<const LayerParams> params,
                       const Tensor& input) override {
    if (!desc_.supports_fusion) throw CapabilityError(desc_.name + ": fusion not supported");
    check_fusion_chain(specs, params.size());
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : specs) arr.push_back(to_json(s));
    PayloadWriter w;
    w.text(arr.dump());
    w.u32(static_cast<std::uint32_t>(specs.size()));
    for (const auto& p : params) w.u32(static_cast<std::uint32_t>(p.size()));
    for (const auto& p : params) {
      for (std::size_t i = 0; i < p.size(); ++i) w.tensor(p[i]);
    }
    w.tensor(input);
    const Message m = roundtrip({MsgType::fused, w.take()}, MsgType::result);
    PayloadReader r(m.payload);
    return r.tensor();
  }

 private:
  Message roundtrip(const Message& req, MsgType expect) {
    write_message(out_, req);
    auto m = read_message(in_);
    if (!m) throw BackendError("worker exited unexpectedly");
    if (m->type == MsgType::error) {
      PayloadReader r(m->payload);
      const auto code = r.u8();
      const std::string what = r.text();
      if (code == 1) throw CapabilityError(what);
      throw BackendError("worker: " + what);
    }
    if (m->type != expect) throw BackendError("worker: unexpected reply type");
    return std::move(*m);
  }

  void cleanup() {
    if (out_ >= 0) ::close(out_);
    if (in_ >= 0) ::close(in_);
    out_ = in_ = -1;
    if (pid_ > 0) {
      int status = 0;
      waitpid(pid_, &status, 0);
      pid_ = -1;
    }
  }

  pid_t pid_ = -1;
  int out_ = -1;
  int in_ = -1;
  BackendDescriptor desc_;
};

}  // namespace

}  // namespace nnbench::worker

namespace nnbench {

std::unique_ptr<Backend> make_worker_backend(const std::filesystem::path& worker, const std::string& inner) {
  if (!std::filesystem::exists(worker)) throw BackendError("worker executable not found: " + worker.string());
  return std::make_unique<worker::WorkerBackend>(worker, inner);
}

}  // namespace nnbench
