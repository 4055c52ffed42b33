#include "nnbench/registry.hpp"

#include <algorithm>
#include <map>

#include "nnbench/error.hpp"

namespace nnbench {

namespace {

LayerSpec make(std::string name, LayerKind kind, TensorShape in, Hyperparams hp = NoParams{}) {
  LayerSpec s;
  s.name = std::move(name);
  s.kind = kind;
  s.input_shape = std::move(in);
  s.hyper = std::move(hp);
  return s;
}

ConvParams convp(std::uint64_t co, std::uint64_t k, std::uint64_t s = 1, std::uint64_t p = 0) {
  return ConvParams{co, k, k, s, s, p, p};
}

PoolParams poolp(std::uint64_t k, std::uint64_t s, std::uint64_t p = 0) { return PoolParams{k, k, s, s, p, p}; }

LRNParams lrnp(std::uint64_t size, double alpha) { return LRNParams{size, alpha, 0.75, 1.0}; }

LSTMParams lstmp(std::uint64_t hidden, std::uint64_t t, bool bi = false) { return LSTMParams{hidden, t, bi}; }

// Tracks the running shape while appending layers to a descriptor.
class NetBuilder {
 public:
  NetBuilder(std::string name, TensorShape input) : cur_(std::move(input)) { net_.name = std::move(name); }

  int add(std::string name, LayerKind kind, Hyperparams hp = NoParams{}) {
    const auto idx = static_cast<std::int64_t>(net_.layers.size());
    for (auto& e : pending_) {
      e.to = idx;
      net_.edges.push_back(e);
    }
    pending_.clear();
    net_.layers.push_back(make(std::move(name), kind, cur_, std::move(hp)));
    cur_ = output_shape(net_.layers.back());
    outs_.push_back(cur_);
    return static_cast<int>(idx);
  }

  int conv(std::string n, std::uint64_t co, std::uint64_t k, std::uint64_t s = 1, std::uint64_t p = 0) {
    return add(std::move(n), LayerKind::Conv, convp(co, k, s, p));
  }
  int deconv(std::string n, std::uint64_t co, std::uint64_t k, std::uint64_t s = 1, std::uint64_t p = 0) {
    return add(std::move(n), LayerKind::Deconv, convp(co, k, s, p));
  }
  int maxpool(std::string n, std::uint64_t k, std::uint64_t s, std::uint64_t p = 0) {
    return add(std::move(n), LayerKind::PoolMax, poolp(k, s, p));
  }
  int avgpool(std::string n, std::uint64_t k, std::uint64_t s, std::uint64_t p = 0) {
    return add(std::move(n), LayerKind::PoolAvg, poolp(k, s, p));
  }
  int fc(std::string n, std::uint64_t out) { return add(std::move(n), LayerKind::FC, FCParams{out}); }
  int relu(std::string n) { return add(std::move(n), LayerKind::ReLU); }
  int sigmoid(std::string n) { return add(std::move(n), LayerKind::Sigmoid); }
  int bn(std::string n) { return add(std::move(n), LayerKind::BN, BNParams{}); }
  int lrn(std::string n, std::uint64_t size, double alpha) { return add(std::move(n), LayerKind::LRN, lrnp(size, alpha)); }
  int lstm(std::string n, std::uint64_t hidden, bool bi = false) {
    return add(std::move(n), LayerKind::LSTM, lstmp(hidden, cur_[0], bi));
  }
  int unpool_max(std::string n, int pool) {
    const auto& p = net_.layers.at(static_cast<std::size_t>(pool)).pool();
    pending_.push_back(Edge{pool, 0, EdgeKind::switches});
    return add(std::move(n), LayerKind::UnpoolMax, p);
  }

  /// Reinterpret the running shape; element count must not change.
  void reshape(TensorShape s) {
    if (s.element_count() != cur_.element_count()) {
      throw ShapeError("builder reshape " + cur_.to_string() + " -> " + s.to_string());
    }
    cur_ = std::move(s);
  }
  /// Next layer reads the output of `layer` instead of its predecessor.
  void from(int layer) {
    pending_.push_back(Edge{layer, 0, EdgeKind::input});
    cur_ = outs_.at(static_cast<std::size_t>(layer));
  }
  /// Next layer starts a detached segment fed by a synthetic tensor.
  void external(TensorShape s) {
    pending_.push_back(Edge{-1, 0, EdgeKind::external});
    cur_ = std::move(s);
  }
  /// Next layer adds the output of `layer` to its input.
  void skip(int layer) { pending_.push_back(Edge{layer, 0, EdgeKind::skip}); }

  int last() const { return static_cast<int>(net_.layers.size()) - 1; }
  const TensorShape& shape() const { return cur_; }

  NetworkDescriptor build(bool executable) {
    net_.executable = executable;
    validate_network(net_);
    return net_;
  }

 private:
  NetworkDescriptor net_;
  TensorShape cur_;
  std::vector<TensorShape> outs_;
  std::vector<Edge> pending_;
};

// VGG-16 convolutional trunk (13 conv + relu, pools after each block).
void vgg_trunk(NetBuilder& b, bool pool5 = true) {
  const std::uint64_t widths[5] = {64, 128, 256, 512, 512};
  const int depth[5] = {2, 2, 3, 3, 3};
  for (int blk = 0; blk < 5; ++blk) {
    for (int i = 0; i < depth[blk]; ++i) {
      const std::string id = std::to_string(blk + 1) + "_" + std::to_string(i + 1);
      b.conv("conv" + id, widths[blk], 3, 1, 1);
      b.relu("relu" + id);
    }
    if (blk < 4 || pool5) b.maxpool("pool" + std::to_string(blk + 1), 2, 2);
  }
}

void vgg_head(NetBuilder& b, std::uint64_t classes) {
  b.fc("fc6", 4096);
  b.relu("relu6");
  b.fc("fc7", 4096);
  b.relu("relu7");
  if (classes) b.fc("fc8", classes);
}

// ResNet bottleneck block; stride sits on the first 1x1 convolution.
void bottleneck(NetBuilder& b, const std::string& id, std::uint64_t mid, std::uint64_t out, std::uint64_t stride,
                bool project) {
  const int in = b.last();
  b.conv("res" + id + "_branch2a", mid, 1, stride);
  b.bn("bn" + id + "_branch2a");
  b.relu("res" + id + "_branch2a_relu");
  b.conv("res" + id + "_branch2b", mid, 3, 1, 1);
  b.bn("bn" + id + "_branch2b");
  b.relu("res" + id + "_branch2b_relu");
  b.conv("res" + id + "_branch2c", out, 1);
  const int main_end = b.bn("bn" + id + "_branch2c");
  if (project) {
    b.from(in);
    b.conv("res" + id + "_branch1", out, 1, stride);
    const int proj = b.bn("bn" + id + "_branch1");
    b.from(main_end);
    b.skip(proj);
  } else {
    b.skip(in);
  }
  b.relu("res" + id + "_relu");
}

}  // namespace

// ---- networks --------------------------------------------------------------

NetworkDescriptor lenet5() {
  NetBuilder b("lenet5", {1, 1, 32, 32});
  b.conv("conv1", 6, 5);
  b.sigmoid("sig1");
  b.avgpool("pool1", 2, 2);
  b.conv("conv2", 16, 5);
  b.sigmoid("sig2");
  b.avgpool("pool2", 2, 2);
  b.fc("fc1", 120);
  b.sigmoid("sig3");
  b.fc("fc2", 84);
  b.sigmoid("sig4");
  b.fc("fc3", 10);
  return b.build(true);
}

NetworkDescriptor alexnet() {
  NetBuilder b("alexnet", {1, 3, 227, 227});
  b.conv("conv1", 96, 11, 4);
  b.relu("relu1");
  b.lrn("norm1", 5, 1e-4);
  b.maxpool("pool1", 3, 2);
  b.conv("conv2", 256, 5, 1, 2);
  b.relu("relu2");
  b.lrn("norm2", 5, 1e-4);
  b.maxpool("pool2", 3, 2);
  b.conv("conv3", 384, 3, 1, 1);
  b.relu("relu3");
  b.conv("conv4", 384, 3, 1, 1);
  b.relu("relu4");
  b.conv("conv5", 256, 3, 1, 1);
  b.relu("relu5");
  b.maxpool("pool5", 3, 2);
  vgg_head(b, 1000);
  return b.build(true);
}

NetworkDescriptor vgg16() {
  NetBuilder b("vgg16", {1, 3, 224, 224});
  vgg_trunk(b);
  vgg_head(b, 1000);
  return b.build(true);
}

NetworkDescriptor deepface() {
  NetBuilder b("deepface", {1, 3, 224, 224});
  vgg_trunk(b);
  vgg_head(b, 2622);
  return b.build(false);
}

NetworkDescriptor resnet50() {
  NetBuilder b("resnet50", {1, 3, 224, 224});
  b.conv("conv1", 64, 7, 2, 3);
  b.bn("bn_conv1");
  b.relu("conv1_relu");
  b.maxpool("pool1", 3, 2, 1);
  const std::uint64_t mids[4] = {64, 128, 256, 512};
  const int blocks[4] = {3, 4, 6, 3};
  for (int s = 0; s < 4; ++s) {
    for (int k = 0; k < blocks[s]; ++k) {
      const std::string id = std::to_string(s + 2) + static_cast<char>('a' + k);
      const std::uint64_t stride = (k == 0 && s > 0) ? 2 : 1;
      bottleneck(b, id, mids[s], mids[s] * 4, stride, k == 0);
    }
  }
  b.avgpool("pool5", 7, 1);
  b.fc("fc1000", 1000);
  return b.build(false);
}

NetworkDescriptor faster_rcnn() {
  // ZF backbone at 600x1000 with the region proposal network; the
  // detection head runs on 300 pooled region crops fed externally.
  NetBuilder b("faster_rcnn", {1, 3, 600, 1000});
  b.conv("conv1", 96, 7, 2, 3);
  b.relu("relu1");
  b.lrn("norm1", 3, 5e-5);
  b.maxpool("pool1", 3, 2, 1);
  b.conv("conv2", 256, 5, 2, 2);
  b.relu("relu2");
  b.lrn("norm2", 3, 5e-5);
  b.maxpool("pool2", 3, 2, 1);
  b.conv("conv3", 384, 3, 1, 1);
  b.relu("relu3");
  b.conv("conv4", 384, 3, 1, 1);
  b.relu("relu4");
  b.conv("conv5", 256, 3, 1, 1);
  b.relu("relu5");
  b.conv("rpn_conv", 256, 3, 1, 1);
  const int rpn = b.relu("rpn_relu");
  b.conv("rpn_cls_score", 18, 1);
  b.from(rpn);
  b.conv("rpn_bbox_pred", 36, 1);
  b.external({300, 256, 12, 12});
  b.maxpool("roi_pool5", 2, 2);
  b.fc("fc6", 4096);
  b.relu("relu6");
  b.fc("fc7", 4096);
  const int r7 = b.relu("relu7");
  b.fc("cls_score", 21);
  b.from(r7);
  b.fc("bbox_pred", 84);
  return b.build(false);
}

NetworkDescriptor deconvnet() {
  NetBuilder b("deconvnet", {1, 3, 224, 224});
  const std::uint64_t widths[5] = {64, 128, 256, 512, 512};
  const int depth[5] = {2, 2, 3, 3, 3};
  int pools[5];
  for (int blk = 0; blk < 5; ++blk) {
    for (int i = 0; i < depth[blk]; ++i) {
      const std::string id = std::to_string(blk + 1) + "_" + std::to_string(i + 1);
      b.conv("conv" + id, widths[blk], 3, 1, 1);
      b.bn("bn" + id);
      b.relu("relu" + id);
    }
    pools[blk] = b.maxpool("pool" + std::to_string(blk + 1), 2, 2);
  }
  b.conv("fc6", 4096, 7);
  b.bn("bn6");
  b.relu("relu6");
  b.conv("fc7", 4096, 1);
  b.bn("bn7");
  b.relu("relu7");
  b.deconv("fc6_deconv", 512, 7);
  b.bn("fc6_deconv_bn");
  b.relu("fc6_deconv_relu");
  // Decoder mirrors the encoder: unpool with the matching switches, then
  // deconvolutions whose last member narrows to the next block's width.
  for (int blk = 4; blk >= 0; --blk) {
    b.unpool_max("unpool" + std::to_string(blk + 1), pools[blk]);
    for (int i = depth[blk]; i >= 1; --i) {
      const std::string id = std::to_string(blk + 1) + "_" + std::to_string(i);
      const std::uint64_t co = (i == 1 && blk > 0) ? widths[blk - 1] : widths[blk];
      b.deconv("deconv" + id, co, 3, 1, 1);
      b.bn("debn" + id);
      b.relu("derelu" + id);
    }
  }
  b.conv("seg_score", 21, 1);
  return b.build(true);
}

NetworkDescriptor fcln() {
  NetBuilder b("fcln", {1, 3, 480, 640});
  vgg_trunk(b, false);
  // Localization layer: anchor scoring convolutions over conv5_3.
  b.conv("loc_conv", 256, 3, 1, 1);
  const int loc = b.relu("loc_relu");
  b.conv("loc_box_scores", 60, 1);
  b.from(loc);
  b.conv("loc_box_offsets", 48, 1);
  // Recognition network on 300 bilinearly sampled 7x7 region features.
  b.external({300, 512, 7, 7});
  b.fc("rec_fc6", 4096);
  b.relu("rec_relu6");
  b.fc("rec_fc7", 4096);
  const int r7 = b.relu("rec_relu7");
  b.fc("rec_box_reg", 4);
  b.from(r7);
  b.fc("rec_score", 1);
  // Language model: 15 word steps per region, 512-d embeddings.
  b.external({15, 300, 512});
  b.lstm("lm_lstm", 512);
  b.reshape({4500, 512});
  b.fc("lm_vocab", 10497);
  return b.build(false);
}

NetworkDescriptor s2vt() {
  NetBuilder b("s2vt", {80, 3, 224, 224});
  vgg_trunk(b);
  vgg_head(b, 0);
  b.reshape({80, 1, 4096});
  b.lstm("lstm1", 1000);
  b.lstm("lstm2", 1000);
  b.reshape({80, 1000});
  b.fc("vocab", 12594);
  return b.build(false);
}

NetworkDescriptor rnn() {
  // Five bidirectional layers of 500 units over 300 frames of 123-d features.
  NetBuilder b("rnn", {300, 1, 123});
  for (int i = 1; i <= 5; ++i) b.lstm("blstm" + std::to_string(i), 500, true);
  b.reshape({300, 1000});
  b.fc("output", 29);
  return b.build(false);
}

NetworkDescriptor syntaxnet() {
  NetBuilder b("syntaxnet", {400, 2304});
  b.fc("hidden1", 1024);
  b.relu("relu1");
  b.fc("hidden2", 1024);
  b.relu("relu2");
  b.fc("softmax", 100);
  return b.build(false);
}

NetworkDescriptor lstm2() {
  NetBuilder b("lstm2", {16, 1, 64});
  b.lstm("lstm1", 128);
  b.lstm("lstm2", 128);
  b.reshape({16, 128});
  b.fc("classifier", 10);
  return b.build(true);
}

// ---- variants ---------------------------------------------------------------

namespace {

// Pruned densities per weighted layer, in layer order.
const std::map<std::string, std::vector<double>>& sparse_densities() {
  static const std::map<std::string, std::vector<double>> table = {
      {"lenet5", {0.66, 0.12, 0.08, 0.12, 0.19}},
      {"alexnet", {0.84, 0.38, 0.35, 0.37, 0.37, 0.09, 0.09, 0.25}},
      {"vgg16", {0.58, 0.22, 0.34, 0.36, 0.53, 0.24, 0.42, 0.32, 0.27, 0.34, 0.35, 0.29, 0.36, 0.04, 0.04, 0.23}},
  };
  return table;
}

}  // namespace

NetworkDescriptor sparse_variant(const NetworkDescriptor& dense) {
  const auto& table = sparse_densities();
  auto it = table.find(dense.name);
  if (it == table.end()) throw SpecError("name", "no sparse densities for network '" + dense.name + "'");
  NetworkDescriptor out = dense;
  out.name = "sparse_" + dense.name;
  out.variant = Variant::sparse;
  std::size_t k = 0;
  for (auto& l : out.layers) {
    if (l.kind != LayerKind::Conv && l.kind != LayerKind::FC) continue;
    l.sparsity = it->second.at(k++);
  }
  if (k != it->second.size()) throw SpecError("layers", "density table does not match " + dense.name);
  validate_network(out);
  return out;
}

NetworkDescriptor fx16_variant(const NetworkDescriptor& dense) {
  NetworkDescriptor out = dense;
  out.name = "fx16_" + dense.name;
  out.variant = Variant::fx16;
  for (auto& l : out.layers) l.precision = Precision::fx16;
  return out;
}

std::vector<NetworkDescriptor> macro_networks() {
  return {lenet5(), rnn(),      alexnet(), vgg16(), resnet50(), faster_rcnn(),
          deepface(), deconvnet(), fcln(),   s2vt(),  syntaxnet()};
}

std::vector<NetworkDescriptor> macro_suite() {
  auto v = macro_networks();
  v.push_back(sparse_variant(lenet5()));
  v.push_back(sparse_variant(alexnet()));
  v.push_back(sparse_variant(vgg16()));
  return v;
}

std::vector<NetworkDescriptor> all_networks() {
  auto v = macro_suite();
  v.push_back(lstm2());
  return v;
}

std::vector<NetworkDescriptor> executable_networks() {
  std::vector<NetworkDescriptor> v;
  for (auto& n : all_networks()) {
    if (n.executable) v.push_back(std::move(n));
  }
  return v;
}

NetworkDescriptor find_network(std::string_view name) {
  for (auto& n : all_networks()) {
    if (n.name == name) return n;
  }
  if (name.rfind("fx16_", 0) == 0) return fx16_variant(find_network(name.substr(5)));
  throw SpecError("network", "unknown network '" + std::string(name) + "'");
}

// ---- micro configurations ----------------------------------------------------

namespace {

const LayerSpec& layer_of(const NetworkDescriptor& net, std::string_view name) {
  for (const auto& l : net.layers) {
    if (l.name == name) return l;
  }
  throw SpecError("layer", "no layer '" + std::string(name) + "' in " + net.name);
}

struct Builder {
  LayerKind kind;
  std::vector<MicroConfig> out;

  void from(const NetworkDescriptor& net, std::string_view layer) {
    MicroConfig m{ConfigClass::from_label(static_cast<char>('A' + out.size())), layer_of(net, layer),
                  net.name + "/" + std::string(layer)};
    out.push_back(std::move(m));
  }
  void add(TensorShape in, Hyperparams hp = NoParams{}, double density = 1.0) {
    const char label = static_cast<char>('A' + out.size());
    LayerSpec s = make(std::string(to_string(kind)) + "_" + label, kind, std::move(in), std::move(hp));
    s.sparsity = density;
    validate(s);
    out.push_back(MicroConfig{ConfigClass::from_label(label), std::move(s), {}});
  }
};

std::vector<MicroConfig> build_table(LayerKind kind) {
  Builder t{kind, {}};
  switch (kind) {
    case LayerKind::Conv: {
      const auto vgg = vgg16();
      t.from(lenet5(), "conv2");
      t.from(vgg, "conv1_2");
      t.from(alexnet(), "conv1");
      t.add({1, 1, 3, 3}, convp(1, 3));
      t.add({16, 256, 56, 56}, convp(256, 3, 1, 1));
      t.add({1, 512, 266, 266}, convp(1024, 11));
      t.add({1, 2048, 768, 768}, convp(64, 3, 1, 1));
      break;
    }
    case LayerKind::PoolAvg:
      t.from(lenet5(), "pool1");
      t.from(lenet5(), "pool2");
      t.from(resnet50(), "pool5");
      t.add({1, 1, 2, 2}, poolp(2, 2));
      t.add({64, 64, 112, 112}, poolp(2, 2));
      t.add({1, 256, 1024, 1024}, poolp(3, 2));
      t.add({1, 64, 2048, 2048}, poolp(8, 8));
      break;
    case LayerKind::PoolMax:
      t.from(alexnet(), "pool1");
      t.from(vgg16(), "pool1");
      t.from(resnet50(), "pool1");
      t.add({1, 1, 2, 2}, poolp(2, 2));
      t.add({64, 64, 112, 112}, poolp(2, 2));
      t.add({1, 256, 1024, 1024}, poolp(3, 2));
      t.add({1, 64, 2048, 2048}, poolp(8, 8));
      break;
    case LayerKind::FC:
      t.from(lenet5(), "fc3");
      t.from(lenet5(), "fc1");
      t.from(alexnet(), "fc6");
      t.add({1, 1}, FCParams{1});
      t.add({1024, 4096}, FCParams{4096});
      t.add({1, 16384}, FCParams{16384}, 0.02);
      t.add({1, 25088}, FCParams{65536});
      break;
    case LayerKind::ReLU:
      t.from(alexnet(), "relu1");
      t.from(vgg16(), "relu1_2");
      t.from(alexnet(), "relu6");
      t.add({1, 1});
      t.add({32, 64, 224, 224});
      t.add({1, 512, 1024, 1024});
      t.add({8192, 65536});
      break;
    case LayerKind::Sigmoid:
      t.from(lenet5(), "sig1");
      t.from(lenet5(), "sig2");
      t.from(lenet5(), "sig3");
      t.add({1, 1});
      t.add({32, 64, 224, 224});
      t.add({1, 512, 1024, 1024});
      t.add({8192, 65536});
      break;
    case LayerKind::LRN:
      t.from(alexnet(), "norm1");
      t.from(alexnet(), "norm2");
      t.from(faster_rcnn(), "norm1");
      t.add({1, 1, 1, 1}, lrnp(1, 1e-4));
      t.add({32, 96, 55, 55}, lrnp(5, 1e-4));
      t.add({1, 1024, 128, 128}, lrnp(11, 1e-4));
      t.add({1, 96, 1024, 1024}, lrnp(5, 1e-4));
      break;
    case LayerKind::BN: {
      const auto dn = deconvnet();
      t.from(dn, "bn1_1");
      t.from(dn, "bn5_1");
      t.from(resnet50(), "bn_conv1");
      t.add({1, 1}, BNParams{});
      t.add({256, 64, 56, 56}, BNParams{});
      t.add({1, 512, 1024, 1024}, BNParams{});
      t.add({256, 2048, 14, 14}, BNParams{});
      break;
    }
    case LayerKind::Deconv: {
      const auto dn = deconvnet();
      t.from(dn, "fc6_deconv");
      t.from(dn, "deconv5_1");
      t.from(dn, "deconv1_2");
      t.add({1, 1, 1, 1}, convp(1, 1));
      t.add({1, 512, 56, 56}, convp(256, 4, 2, 1));
      t.add({1, 256, 128, 128}, convp(256, 16, 8, 4));
      t.add({16, 512, 28, 28}, convp(512, 3, 1, 1));
      break;
    }
    case LayerKind::UnpoolMax: {
      const auto dn = deconvnet();
      t.from(dn, "unpool5");
      t.from(dn, "unpool4");
      t.from(dn, "unpool1");
      t.add({1, 1, 1, 1}, poolp(2, 2));
      t.add({32, 64, 112, 112}, poolp(2, 2));
      t.add({1, 256, 512, 512}, poolp(2, 2));
      t.add({1, 64, 256, 256}, poolp(8, 8));
      break;
    }
    case LayerKind::UnpoolAvg: {
      // No shipped network unpools by averaging; A-C reuse the DeconvNet
      // unpooling geometry.
      const auto dn = deconvnet();
      for (const char* name : {"unpool5", "unpool4", "unpool1"}) {
        const auto& src = layer_of(dn, name);
        t.add(src.input_shape, src.hyper);
        t.out.back().source = "deconvnet/" + std::string(name);
      }
      t.add({1, 1, 1, 1}, poolp(2, 2));
      t.add({32, 64, 112, 112}, poolp(2, 2));
      t.add({1, 256, 512, 512}, poolp(2, 2));
      t.add({1, 64, 256, 256}, poolp(8, 8));
      break;
    }
    case LayerKind::LSTM:
      t.from(lstm2(), "lstm1");
      t.from(lstm2(), "lstm2");
      t.from(s2vt(), "lstm1");
      t.add({1, 1, 1}, lstmp(1, 1));
      t.add({300, 1, 1000}, lstmp(500, 300, true));
      t.add({1000, 64, 1024}, lstmp(2048, 1000));
      t.add({4096, 1, 512}, lstmp(4096, 4096));
      break;
  }
  return std::move(t.out);
}

}  // namespace

std::vector<MicroConfig> config_table(LayerKind kind) {
  static const auto tables = [] {
    std::map<LayerKind, std::vector<MicroConfig>> m;
    for (LayerKind k : kAllKinds) m[k] = build_table(k);
    return m;
  }();
  return tables.at(kind);
}

std::vector<MicroConfig> config_table(std::string_view kind_name) {
  const auto k = parse_kind(kind_name);
  if (!k) throw SpecError("kind", "unknown layer kind '" + std::string(kind_name) + "'");
  return config_table(*k);
}

MicroConfig micro_config(LayerKind kind, char label) {
  const auto table = config_table(kind);
  const auto i = static_cast<std::size_t>(label - 'A');
  if (label < 'A' || i >= table.size()) {
    throw SpecError("config", "no configuration '" + std::string(1, label) + "' for " + std::string(to_string(kind)));
  }
  return table[i];
}

std::string micro_id(LayerKind kind, char label) { return std::string(to_string(kind)) + "/" + label; }

}  // namespace nnbench
