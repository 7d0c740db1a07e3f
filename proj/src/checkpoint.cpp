#include "fraggen/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <map>

namespace fraggen {

namespace {

constexpr char kMagic[8] = {'F', 'G', 'C', 'K', 'P', 'T', '0', '1'};

void put_u32(std::ostream& f, uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  f.write(reinterpret_cast<char*>(b), 4);
}

void put_u64(std::ostream& f, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  f.write(reinterpret_cast<char*>(b), 8);
}

void put_f64(std::ostream& f, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(f, bits);
}

uint32_t get_u32(std::istream& f) {
  unsigned char b[4];
  f.read(reinterpret_cast<char*>(b), 4);
  uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

uint64_t get_u64(std::istream& f) {
  unsigned char b[8];
  f.read(reinterpret_cast<char*>(b), 8);
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

double get_f64(std::istream& f) {
  const uint64_t bits = get_u64(f);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelParameters& params,
                     const std::string& config_text, uint64_t vocab_hash) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write checkpoint: " + path);
  f.write(kMagic, 8);
  put_u64(f, vocab_hash);
  put_u32(f, static_cast<uint32_t>(config_text.size()));
  f.write(config_text.data(), static_cast<std::streamsize>(config_text.size()));

  uint32_t count = 0;
  visit_tensors(params, [&](const std::string&, const double*, int, int) { ++count; });
  put_u32(f, count);
  visit_tensors(params, [&](const std::string& name, const double* data, int rows,
                            int cols) {
    put_u32(f, static_cast<uint32_t>(name.size()));
    f.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_u32(f, static_cast<uint32_t>(rows));
    put_u32(f, static_cast<uint32_t>(cols));
    // tensors are column-major in memory; serialize row-major for a defined layout
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) put_f64(f, data[static_cast<long>(j) * rows + i]);
  });
  if (!f) throw std::runtime_error("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read checkpoint: " + path);
  char magic[8];
  f.read(magic, 8);
  if (std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("bad checkpoint magic in " + path);
  Checkpoint ck;
  ck.vocab_hash = get_u64(f);
  const uint32_t cfg_len = get_u32(f);
  ck.config_text.resize(cfg_len);
  f.read(ck.config_text.data(), cfg_len);

  const uint32_t count = get_u32(f);
  std::map<std::string, Eigen::MatrixXd> tensors;
  for (uint32_t k = 0; k < count; ++k) {
    const uint32_t name_len = get_u32(f);
    std::string name(name_len, '\0');
    f.read(name.data(), name_len);
    const int rows = static_cast<int>(get_u32(f));
    const int cols = static_cast<int>(get_u32(f));
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = get_f64(f);
    tensors[name] = std::move(m);
  }
  if (!f) throw std::runtime_error("truncated checkpoint: " + path);

  // derive dims from the tensor shapes
  ModelDims dims;
  dims.vocab = static_cast<int>(tensors.at("embedding").rows());
  dims.embed = static_cast<int>(tensors.at("embedding").cols());
  dims.hidden = static_cast<int>(tensors.at("Wz").rows());
  dims.latent = static_cast<int>(tensors.at("Wmu").rows());
  dims.layers = 0;
  while (tensors.count("encoder." + std::to_string(dims.layers) + ".Wr")) ++dims.layers;

  ck.params = ModelParameters::zeros(dims);
  visit_tensors(ck.params, [&](const std::string& name, double* data, int rows, int cols) {
    auto it = tensors.find(name);
    if (it == tensors.end()) throw std::runtime_error("checkpoint missing tensor " + name);
    const Eigen::MatrixXd& m = it->second;
    if (m.rows() != rows || m.cols() != cols)
      throw std::runtime_error("checkpoint shape mismatch for " + name);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) data[static_cast<long>(j) * rows + i] = m(i, j);
  });
  return ck;
}

uint64_t file_hash(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read file: " + path);
  uint64_t h = 1469598103934665603ULL;
  char buf[65536];
  while (f.read(buf, sizeof(buf)) || f.gcount() > 0) {
    const std::streamsize n = f.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
    if (!f) break;
  }
  return h;
}

}  // namespace fraggen
