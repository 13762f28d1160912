#include "ksnd/cli/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "ksnd/cli/errors.hpp"

namespace ksnd::cli {

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[4] = {'K', 'S', 'N', 'D'};

class Writer {
 public:
  template <typename T>
  void put(T v) {
    const auto* p = reinterpret_cast<const unsigned char*>(&v);
    bytes.insert(bytes.end(), p, p + sizeof(T));
  }
  std::vector<unsigned char> bytes;
};

class Reader {
 public:
  explicit Reader(const std::vector<unsigned char>& b) : bytes_(b) {}
  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > limit_) throw IoError("checkpoint truncated");
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  void set_limit(std::size_t l) { limit_ = l; }
  std::size_t pos() const { return pos_; }

 private:
  const std::vector<unsigned char>& bytes_;
  std::size_t pos_ = 0;
  std::size_t limit_ = 0;
};

}  // namespace

std::uint64_t fnv1a64(const unsigned char* data, std::size_t size) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<unsigned char> encode_checkpoint(const Checkpoint& cp) {
  if (cp.orbitals.empty()) throw IoError("checkpoint needs at least one orbital");
  const Grid& g = cp.orbitals.front().grid();
  Writer w;
  for (char c : kMagic) w.put(c);
  w.put(checkpoint_version);
  w.put(static_cast<std::uint32_t>(g.points_per_axis()));
  w.put(static_cast<std::uint32_t>(cp.orbitals.size()));
  w.put(static_cast<std::uint32_t>(cp.nuclei.size()));
  w.put(g.box_length());
  w.put(cp.time);
  for (std::size_t k = 0; k < cp.nuclei.size(); ++k) {
    for (double x : cp.nuclei.positions[k]) w.put(x);
    for (double x : cp.nuclei.velocities[k]) w.put(x);
    w.put(cp.nuclei.masses[k]);
    w.put(static_cast<std::uint32_t>(cp.nuclei.charges[k]));
  }
  for (const auto& f : cp.orbitals) {
    if (!(f.grid() == g)) throw IoError("checkpoint orbitals live on different grids");
    for (const Complex& z : f.values()) {
      w.put(z.real());
      w.put(z.imag());
    }
  }
  w.put(fnv1a64(w.bytes.data(), w.bytes.size()));
  return std::move(w.bytes);
}

Checkpoint decode_checkpoint(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < 8 + sizeof(std::uint64_t)) throw IoError("checkpoint truncated");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw IoError("not a KSND checkpoint (bad magic)");
  const std::size_t body = bytes.size() - sizeof(std::uint64_t);
  std::uint64_t stored = 0;
  std::memcpy(&stored, bytes.data() + body, sizeof stored);
  Reader r(bytes);
  r.set_limit(body);
  for (int i = 0; i < 4; ++i) r.get<char>();
  const auto version = r.get<std::uint32_t>();
  if (version != checkpoint_version) {
    throw IoError("checkpoint version " + std::to_string(version) + " not supported (expected " +
                  std::to_string(checkpoint_version) + ")");
  }
  if (fnv1a64(bytes.data(), body) != stored) throw IoError("checkpoint checksum mismatch");
  const auto n = r.get<std::uint32_t>();
  const auto norb = r.get<std::uint32_t>();
  const auto m = r.get<std::uint32_t>();
  const double box = r.get<double>();
  const std::size_t expected = 4 + 4 * 4 + 16 + std::size_t{m} * (7 * 8 + 4) +
                               std::size_t{norb} * std::size_t{n} * n * n * 16;
  if (expected != body) throw IoError("checkpoint size does not match its header");

  Checkpoint cp;
  cp.time = r.get<double>();
  for (std::uint32_t k = 0; k < m; ++k) {
    Vec3 p, v;
    for (auto& x : p) x = r.get<double>();
    for (auto& x : v) x = r.get<double>();
    cp.nuclei.positions.push_back(p);
    cp.nuclei.velocities.push_back(v);
    cp.nuclei.masses.push_back(r.get<double>());
    cp.nuclei.charges.push_back(static_cast<int>(r.get<std::uint32_t>()));
  }
  GridPtr grid;
  try {
    grid = Grid::make(n, box);
  } catch (const std::exception& e) {
    throw IoError(std::string("checkpoint grid invalid: ") + e.what());
  }
  for (std::uint32_t j = 0; j < norb; ++j) {
    ComplexField f(grid);
    for (auto& z : f.values()) {
      const double re = r.get<double>();
      const double im = r.get<double>();
      z = Complex(re, im);
    }
    cp.orbitals.push_back(std::move(f));
  }
  return cp;
}

void write_checkpoint(const Checkpoint& cp, const std::string& path) {
  const auto bytes = encode_checkpoint(cp);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing checkpoint " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read checkpoint " + path);
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace ksnd::cli
