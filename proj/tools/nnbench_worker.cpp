// Out-of-process backend host. Spawned by the "worker:<inner>" backend with
// the inner backend name as its only argument; speaks the framed protocol
// from nnbench/worker.hpp on stdin/stdout.
#include <cstdio>
#include <string>

#include <unistd.h>

#include "nnbench/backend.hpp"
#include "nnbench/worker.hpp"

namespace {

// Answers the client's hello with an error so it can report why the inner
// backend did not load.
int refuse(const std::string& why) {
  using namespace nnbench::worker;
  try {
    if (auto m = read_message(STDIN_FILENO); m && m->type == MsgType::hello) {
      PayloadWriter w;
      w.u8(2);
      w.text(why);
      write_message(STDOUT_FILENO, {MsgType::error, w.take()});
    }
  } catch (...) {
  }
  std::fprintf(stderr, "nnbench_worker: %s\n", why.c_str());
  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: nnbench_worker <backend>\n");
    return 2;
  }
  const std::string inner = argv[1];
  if (inner.rfind("worker:", 0) == 0) return refuse("nested worker backends are not supported");
  std::unique_ptr<nnbench::Backend> backend;
  try {
    backend = nnbench::open_backend(inner);
  } catch (const std::exception& e) {
    return refuse(e.what());
  }
  return nnbench::worker::serve(*backend, STDIN_FILENO, STDOUT_FILENO);
}
