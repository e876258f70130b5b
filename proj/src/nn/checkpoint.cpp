#include "geoptr/nn/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "geoptr/error.hpp"

namespace geoptr::nn {

namespace {

constexpr std::array<char, 8> kMagic = {'G', 'P', 'T', 'R', 'C', 'K', 'P', 'T'};

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}

  void u8(std::uint8_t v) { os_.put(static_cast<char>(v)); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    os_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void tensor(const Tensor& t, DType dtype) {
    u32(static_cast<std::uint32_t>(t.rows()));
    u32(static_cast<std::uint32_t>(t.cols()));
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      if (dtype == DType::F64) {
        f64(t.data()[i]);
      } else {
        f32(static_cast<float>(t.data()[i]));
      }
    }
  }

 private:
  void le(std::uint64_t v, int bytes) {
    for (int b = 0; b < bytes; ++b) os_.put(static_cast<char>((v >> (8 * b)) & 0xFF));
  }
  std::ostream& os_;
};

class Reader {
 public:
  explicit Reader(std::istream& is) : is_(is) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  float f32() { return std::bit_cast<float>(u32()); }
  std::string str() {
    const std::uint32_t n = u32();
    if (n > (1u << 26)) fail("string length out of range");
    std::string s(n, '\0');
    is_.read(s.data(), n);
    if (!is_) fail("truncated string");
    return s;
  }
  Tensor tensor(DType dtype) {
    const std::uint32_t rows = u32();
    const std::uint32_t cols = u32();
    if (static_cast<std::uint64_t>(rows) * cols > (1ull << 31)) fail("tensor too large");
    Tensor t(rows, cols);
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      t.data()[i] = dtype == DType::F64 ? f64() : static_cast<double>(f32());
    }
    return t;
  }

  [[noreturn]] static void fail(const std::string& what) {
    throw Error(ErrorCode::CorruptFile, "checkpoint: " + what);
  }

 private:
  std::uint64_t le(int bytes) {
    std::uint64_t v = 0;
    for (int b = 0; b < bytes; ++b) {
      const int c = is_.get();
      if (c == std::char_traits<char>::eof()) fail("unexpected end of file");
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * b);
    }
    return v;
  }
  std::istream& is_;
};

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const CheckpointData& data,
                      DType dtype) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  Writer w(os);
  os.write(kMagic.data(), kMagic.size());
  w.u32(kCheckpointVersion);
  w.u8(static_cast<std::uint8_t>(dtype));
  w.str(data.config_json);
  w.u32(static_cast<std::uint32_t>(data.tensors.size()));
  for (const NamedTensor& t : data.tensors) {
    w.str(t.name);
    w.tensor(t.value, dtype);
  }
  w.u8(data.has_optimizer ? 1 : 0);
  if (data.has_optimizer) {
    const AdamState& a = data.optimizer;
    w.u64(a.t);
    w.f64(a.lr);
    w.f64(a.beta1);
    w.f64(a.beta2);
    w.f64(a.eps);
    w.u32(static_cast<std::uint32_t>(a.m.size()));
    // Optimizer moments keep full precision regardless of dtype.
    for (const Tensor& m : a.m) w.tensor(m, DType::F64);
    for (const Tensor& v : a.v) w.tensor(v, DType::F64);
  }
  if (!os) throw Error(ErrorCode::Io, "write to " + path.string() + " failed");
}

CheckpointData read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) Reader::fail("bad magic");
  Reader r(is);
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::VersionMismatch,
                "checkpoint version " + std::to_string(version) + ", expected " +
                    std::to_string(kCheckpointVersion));
  }
  const std::uint8_t tag = r.u8();
  if (tag > 1) Reader::fail("unknown dtype tag");
  const auto dtype = static_cast<DType>(tag);

  CheckpointData data;
  data.config_json = r.str();
  const std::uint32_t n = r.u32();
  for (std::uint32_t k = 0; k < n; ++k) {
    NamedTensor t;
    t.name = r.str();
    t.value = r.tensor(dtype);
    data.tensors.push_back(std::move(t));
  }
  data.has_optimizer = r.u8() != 0;
  if (data.has_optimizer) {
    AdamState& a = data.optimizer;
    a.t = r.u64();
    a.lr = r.f64();
    a.beta1 = r.f64();
    a.beta2 = r.f64();
    a.eps = r.f64();
    const std::uint32_t moments = r.u32();
    for (std::uint32_t k = 0; k < moments; ++k) a.m.push_back(r.tensor(DType::F64));
    for (std::uint32_t k = 0; k < moments; ++k) a.v.push_back(r.tensor(DType::F64));
  }
  if (is.peek() != std::char_traits<char>::eof()) Reader::fail("trailing bytes");
  return data;
}

}  // namespace geoptr::nn
