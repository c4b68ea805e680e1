#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "gcrl/agent.hpp"

namespace gcrl {

namespace {

constexpr char kMagic[8] = {'G', 'C', 'R', 'L', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  void u32(std::uint32_t v) { put(v); }
  void f32(float v) { put(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    out.insert(out.end(), c, c + n);
  }

  std::vector<unsigned char> out;

 private:
  template <typename U>
  void put(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xffu));
    }
  }
};

class Reader {
 public:
  explicit Reader(std::span<const unsigned char> b) : buf_(b) {}

  std::uint32_t u32() { return get<std::uint32_t>(); }
  float f32() { return std::bit_cast<float>(get<std::uint32_t>()); }
  double f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
  void bytes(void* p, std::size_t n) {
    need(n);
    std::memcpy(p, buf_.data() + pos_, n);
    pos_ += n;
  }
  bool done() const { return pos_ == buf_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > buf_.size()) throw Error("checkpoint: truncated file");
  }
  template <typename U>
  U get() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(buf_[pos_ + i]) << (8 * i);
    pos_ += sizeof(U);
    return v;
  }

  std::span<const unsigned char> buf_;
  std::size_t pos_ = 0;
};

void write_net(Writer& w, const DdpgAgent::Net& net) {
  w.u32(static_cast<std::uint32_t>(net.head()));
  w.u32(static_cast<std::uint32_t>(net.layer_count()));
  for (int d : net.dims()) w.u32(static_cast<std::uint32_t>(d));
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const auto& W = net.weights()[l];
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
      for (Eigen::Index j = 0; j < W.cols(); ++j) w.f32(W(i, j));
    }
    const auto& b = net.biases()[l];
    for (Eigen::Index i = 0; i < b.size(); ++i) w.f32(b(i));
  }
}

void read_net(Reader& r, DdpgAgent::Net& net) {
  const auto head = r.u32();
  const auto layers = r.u32();
  if (head != static_cast<std::uint32_t>(net.head()) || layers != net.layer_count()) {
    throw Error("checkpoint: network layout does not match its header");
  }
  for (int d : net.dims()) {
    if (r.u32() != static_cast<std::uint32_t>(d)) throw Error("checkpoint: layer width mismatch");
  }
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    auto& W = net.weights()[l];
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
      for (Eigen::Index j = 0; j < W.cols(); ++j) W(i, j) = r.f32();
    }
    auto& b = net.biases()[l];
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = r.f32();
  }
}

void write_normalizer(Writer& w, const RunningNormalizer& n) {
  w.u32(static_cast<std::uint32_t>(n.dim()));
  w.f64(n.count());
  for (double v : n.sum()) w.f64(v);
  for (double v : n.sumsq()) w.f64(v);
}

void read_normalizer(Reader& r, RunningNormalizer& n) {
  if (r.u32() != n.dim()) throw Error("checkpoint: normalizer dimension mismatch");
  const double count = r.f64();
  std::vector<double> sum(n.dim()), sumsq(n.dim());
  for (auto& v : sum) v = r.f64();
  for (auto& v : sumsq) v = r.f64();
  n.restore(count, std::move(sum), std::move(sumsq));
}

}  // namespace

std::vector<unsigned char> serialize_checkpoint(const DdpgAgent& agent, const std::string& env_name) {
  Writer w;
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kVersion);
  w.u32(sizeof(DdpgAgent::Scalar));
  w.u32(static_cast<std::uint32_t>(env_name.size()));
  w.bytes(env_name.data(), env_name.size());
  const EnvDims d = agent.dims();
  w.u32(static_cast<std::uint32_t>(d.state));
  w.u32(static_cast<std::uint32_t>(d.action));
  w.u32(static_cast<std::uint32_t>(d.goal));
  const AgentConfig& c = agent.config();
  for (double v : {static_cast<double>(c.hidden), static_cast<double>(c.hidden_layers), c.gamma,
                   c.polyak, c.lr_actor, c.lr_critic, c.noise_sigma, c.random_action_prob,
                   c.action_l2, c.norm_eps, c.norm_clip}) {
    w.f64(v);
  }
  write_net(w, agent.actor());
  write_net(w, agent.critic());
  write_net(w, agent.target_actor());
  write_net(w, agent.target_critic());
  write_normalizer(w, agent.obs_normalizer());
  write_normalizer(w, agent.goal_normalizer());
  return std::move(w.out);
}

LoadedAgent deserialize_checkpoint(std::span<const unsigned char> bytes) {
  Reader r(bytes);
  char magic[8];
  r.bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw Error("checkpoint: bad magic");
  if (const auto v = r.u32(); v != kVersion) {
    throw Error("checkpoint: unsupported version " + std::to_string(v));
  }
  if (r.u32() != sizeof(DdpgAgent::Scalar)) throw Error("checkpoint: scalar width mismatch");
  std::string env_name(r.u32(), '\0');
  r.bytes(env_name.data(), env_name.size());
  EnvDims d;
  d.state = r.u32();
  d.action = r.u32();
  d.goal = r.u32();
  AgentConfig c;
  c.hidden = static_cast<int>(r.f64());
  c.hidden_layers = static_cast<int>(r.f64());
  c.gamma = r.f64();
  c.polyak = r.f64();
  c.lr_actor = r.f64();
  c.lr_critic = r.f64();
  c.noise_sigma = r.f64();
  c.random_action_prob = r.f64();
  c.action_l2 = r.f64();
  c.norm_eps = r.f64();
  c.norm_clip = r.f64();
  LoadedAgent loaded{env_name, DdpgAgent(d, c, 0)};
  read_net(r, loaded.agent.actor());
  read_net(r, loaded.agent.critic());
  read_net(r, loaded.agent.target_actor());
  read_net(r, loaded.agent.target_critic());
  read_normalizer(r, loaded.agent.obs_normalizer());
  read_normalizer(r, loaded.agent.goal_normalizer());
  if (!r.done()) throw Error("checkpoint: trailing bytes");
  return loaded;
}

void save_checkpoint(const DdpgAgent& agent, const std::string& env_name, const std::string& path) {
  const auto bytes = serialize_checkpoint(agent, env_name);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("checkpoint: cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("checkpoint: write failed for '" + path + "'");
}

LoadedAgent load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("checkpoint: cannot open '" + path + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

}  // namespace gcrl
