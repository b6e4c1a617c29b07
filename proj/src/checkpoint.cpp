#include "sparsetd/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "sparsetd/errors.hpp"

namespace sparsetd {

namespace {

constexpr char kMagic[4] = {'S', 'T', 'D', 'C'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_f64(std::ofstream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_matrix(std::ofstream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) write_f64(out, m(r, c));
}

void write_vector(std::ofstream& out, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) write_f64(out, v(i));
}

struct Reader {
  std::ifstream in;
  std::string path;

  void read(char* dst, size_t n) {
    in.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<size_t>(in.gcount()) != n) {
      throw CorruptCheckpoint("'" + path + "' is truncated");
    }
  }
  std::uint32_t u32() {
    std::uint32_t v;
    read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
  }
  double f64() {
    double v;
    read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
  }
};

}  // namespace

void checkpoint_save(const ApproximatorParams& params, const ArchSpec& arch,
                     const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("checkpoint_save: cannot open '" + path + "'");
  out.write(kMagic, sizeof(kMagic));
  write_u32(out, kVersion);
  write_u32(out, static_cast<std::uint32_t>(arch.kind));
  write_u32(out, static_cast<std::uint32_t>(arch.n_in));
  write_u32(out, static_cast<std::uint32_t>(arch.n_hidden));
  write_u32(out, static_cast<std::uint32_t>(arch.n_out));
  write_u32(out, static_cast<std::uint32_t>(arch.kwta.k));
  write_f64(out, arch.kwta.q);
  write_matrix(out, params.w_ih);
  write_vector(out, params.b_ih);
  write_matrix(out, params.w_ho);
  write_vector(out, params.b_ho);
  if (!out) throw Error("checkpoint_save: write failed for '" + path + "'");
}

std::pair<ApproximatorParams, ArchSpec> checkpoint_load(const std::string& path) {
  Reader r;
  r.path = path;
  r.in.open(path, std::ios::binary);
  if (!r.in) throw CorruptCheckpoint("cannot open '" + path + "'");

  char magic[4];
  r.read(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw CorruptCheckpoint("'" + path + "' has a bad magic tag");
  }
  const std::uint32_t version = r.u32();
  if (version != kVersion) {
    throw CorruptCheckpoint("'" + path + "' has unsupported version " +
                            std::to_string(version) + " (expected " +
                            std::to_string(kVersion) + ")");
  }

  ArchSpec arch;
  const std::uint32_t kind = r.u32();
  if (kind > 2) throw CorruptCheckpoint("'" + path + "' has a bad architecture kind");
  arch.kind = static_cast<ArchKind>(kind);
  arch.n_in = static_cast<int>(r.u32());
  arch.n_hidden = static_cast<int>(r.u32());
  arch.n_out = static_cast<int>(r.u32());
  arch.kwta.k = static_cast<int>(r.u32());
  arch.kwta.q = r.f64();
  try {
    arch.validate();
  } catch (const InvalidValue& e) {
    throw CorruptCheckpoint("'" + path + "' holds an invalid architecture: " + e.what());
  }

  ApproximatorParams p;
  if (arch.kind == ArchKind::Linear) {
    p.w_ih.resize(0, 0);
    p.b_ih.resize(0);
    p.w_ho.resize(arch.n_out, arch.n_in);
  } else {
    p.w_ih.resize(arch.n_hidden, arch.n_in);
    p.b_ih.resize(arch.n_hidden);
    p.w_ho.resize(arch.n_out, arch.n_hidden);
  }
  p.b_ho.resize(arch.n_out);
  for (Eigen::Index i = 0; i < p.w_ih.rows(); ++i)
    for (Eigen::Index j = 0; j < p.w_ih.cols(); ++j) p.w_ih(i, j) = r.f64();
  for (Eigen::Index i = 0; i < p.b_ih.size(); ++i) p.b_ih(i) = r.f64();
  for (Eigen::Index i = 0; i < p.w_ho.rows(); ++i)
    for (Eigen::Index j = 0; j < p.w_ho.cols(); ++j) p.w_ho(i, j) = r.f64();
  for (Eigen::Index i = 0; i < p.b_ho.size(); ++i) p.b_ho(i) = r.f64();

  char extra;
  r.in.read(&extra, 1);
  if (r.in.gcount() != 0) {
    throw CorruptCheckpoint("'" + path + "' has trailing bytes");
  }
  return {std::move(p), arch};
}

}  // namespace sparsetd
