#include "levelk/nn/checkpoint.hpp"

#include "levelk/core/errors.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace levelk::nn {

using Kind = CheckpointError::Kind;

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

constexpr char kMagic[4] = {'L', 'K', 'Q', 'N'};

template <typename T>
void put(std::string& out, T value) {
  char raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
  out.append(raw, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    if (bytes_.size() - pos_ < sizeof(T)) throw CheckpointError(Kind::Corrupt, "checkpoint truncated");
    char raw[sizeof(T)];
    std::memcpy(raw, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, raw, sizeof(T));
    return value;
  }

  std::string_view take(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw CheckpointError(Kind::Corrupt, "checkpoint truncated");
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_checkpoint(const NetworkParams& params, const CheckpointMeta& meta) {
  std::string out(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.spec.layer_sizes.size()));
  for (int n : params.spec.layer_sizes) put<std::uint32_t>(out, static_cast<std::uint32_t>(n));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(meta.policy.size()));
  out += meta.policy;
  put<std::uint64_t>(out, meta.episode);
  put<std::uint64_t>(out, meta.seed);
  for (double v : params.flatten()) put<double>(out, v);
  put<std::uint64_t>(out, fnv1a(out));
  return out;
}

Checkpoint decode_checkpoint(const std::string& bytes, std::optional<int> expected_outputs) {
  Reader r(bytes);
  if (r.take(4) != std::string_view(kMagic, 4)) {
    throw CheckpointError(Kind::Corrupt, "not a checkpoint file (bad magic)");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw CheckpointError(Kind::Version, "unsupported checkpoint version " + std::to_string(version));
  }
  const auto n_sizes = r.get<std::uint32_t>();
  if (n_sizes < 2 || n_sizes > 64) throw CheckpointError(Kind::Corrupt, "implausible layer count");
  NetworkSpec spec;
  for (std::uint32_t i = 0; i < n_sizes; ++i) {
    const auto n = r.get<std::uint32_t>();
    if (n == 0 || n > (1u << 20)) throw CheckpointError(Kind::Corrupt, "implausible layer size");
    spec.layer_sizes.push_back(static_cast<int>(n));
  }
  Checkpoint ck;
  const auto tag_len = r.get<std::uint32_t>();
  ck.meta.policy = std::string(r.take(tag_len));
  ck.meta.episode = r.get<std::uint64_t>();
  ck.meta.seed = r.get<std::uint64_t>();

  ck.params = NetworkParams::zeros(spec);
  const std::size_t count = ck.params.parameter_count();
  if (r.remaining() != count * sizeof(double) + sizeof(std::uint64_t)) {
    throw CheckpointError(Kind::Corrupt, "checkpoint size does not match its layer sizes");
  }
  std::vector<double> flat(count);
  for (auto& v : flat) v = r.get<double>();
  const std::size_t body = r.pos();
  if (r.get<std::uint64_t>() != fnv1a(std::string_view(bytes).substr(0, body))) {
    throw CheckpointError(Kind::Corrupt, "checkpoint checksum mismatch");
  }
  ck.params.assign_flat(flat);

  if (expected_outputs && spec.output_size() != *expected_outputs) {
    throw CheckpointError(Kind::ShapeMismatch,
                          "checkpoint has " + std::to_string(spec.output_size()) +
                              " outputs, expected " + std::to_string(*expected_outputs));
  }
  return ck;
}

void save_params(const NetworkParams& params, const CheckpointMeta& meta,
                 const std::filesystem::path& path) {
  const std::string bytes = encode_checkpoint(params, meta);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError(Kind::Io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError(Kind::Io, "write failed for " + path.string());
}

Checkpoint load_params(const std::filesystem::path& path, std::optional<int> expected_outputs) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(Kind::Io, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_checkpoint(buf.str(), expected_outputs);
}

}  // namespace levelk::nn
