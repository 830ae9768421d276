#include "lstc/checkpoint.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

namespace lstc {

namespace {

constexpr char kMagic[8] = {'L', 'S', 'T', 'C', 'C', 'K', 'P', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_string(std::ostream& out, const std::string& s) {
  put_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t get_u32(std::istream& in) {
  std::uint32_t v;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
std::uint64_t get_u64(std::istream& in) {
  std::uint64_t v;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
double get_f64(std::istream& in) {
  double v;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}
std::string get_string(std::istream& in) {
  const std::uint64_t n = get_u64(in);
  if (n > (1ULL << 30)) throw CheckpointError("corrupt checkpoint: huge string");
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  return s;
}

void put_net(std::ostream& out, const std::string& name, const nn::Mlp& net) {
  put_string(out, name);
  const auto arrays = nn::export_params(net, /*with_adam=*/true);
  put_u32(out, static_cast<std::uint32_t>(arrays.size()));
  for (const auto& arr : arrays) {
    put_string(out, arr.name);
    put_u64(out, arr.values.size());
    out.write(reinterpret_cast<const char*>(arr.values.data()),
              static_cast<std::streamsize>(arr.values.size() * sizeof(double)));
  }
}

void get_net(std::istream& in, const std::string& expect_name, nn::Mlp& net) {
  const std::string name = get_string(in);
  if (name != expect_name)
    throw CheckpointError("checkpoint: expected net '" + expect_name +
                          "', found '" + name + "'");
  const std::uint32_t count = get_u32(in);
  std::vector<nn::NamedArray> arrays(count);
  for (auto& arr : arrays) {
    arr.name = get_string(in);
    const std::uint64_t n = get_u64(in);
    arr.values.resize(n);
    in.read(reinterpret_cast<char*>(arr.values.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
  }
  if (!in) throw CheckpointError("checkpoint: truncated net block");
  nn::import_params(net, arrays);
}

}  // namespace

void save_checkpoint(const std::string& path, const rl::Trainer& trainer) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write checkpoint: " + path);
    out.write(kMagic, sizeof kMagic);
    put_u32(out, kCheckpointVersion);
    put_string(out, serialize_config(trainer.config()));
    put_u64(out, static_cast<std::uint64_t>(trainer.epoch()));
    put_u64(out, static_cast<std::uint64_t>(trainer.steps_done()));
    auto& t = const_cast<rl::Trainer&>(trainer);
    put_f64(out, t.lagrange().lambda_l);
    put_f64(out, t.lagrange().lambda_s);
    put_u32(out, 4);
    put_net(out, "policy", t.policy());
    put_net(out, "value", t.value());
    put_net(out, "cost_value", t.cost_value());
    put_net(out, "validation", t.validation());
    if (!out) throw CheckpointError("short write on checkpoint: " + path);
  }
  fs::rename(tmp, target);
}

std::unique_ptr<rl::Trainer> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw CheckpointError("not a checkpoint file: " + path);
  const std::uint32_t version = get_u32(in);
  if (version != kCheckpointVersion)
    throw CheckpointError("checkpoint version " + std::to_string(version) +
                          " unsupported (this build reads version " +
                          std::to_string(kCheckpointVersion) + ")");
  const std::string config_text = get_string(in);
  const auto epoch = static_cast<long>(get_u64(in));
  const auto steps = static_cast<long>(get_u64(in));
  const double lambda_l = get_f64(in);
  const double lambda_s = get_f64(in);

  RunConfig cfg = parse_config_text(config_text, path + "#config");
  auto trainer = std::make_unique<rl::Trainer>(cfg);
  const std::uint32_t nets = get_u32(in);
  if (nets != 4) throw CheckpointError("checkpoint: expected 4 nets");
  get_net(in, "policy", trainer->policy());
  get_net(in, "value", trainer->value());
  get_net(in, "cost_value", trainer->cost_value());
  get_net(in, "validation", trainer->validation());
  trainer->lagrange().lambda_l = lambda_l;
  trainer->lagrange().lambda_s = lambda_s;
  trainer->set_progress(epoch, steps);
  return trainer;
}

}  // namespace lstc
