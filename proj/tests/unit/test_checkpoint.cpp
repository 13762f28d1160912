#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "ksnd/cli/checkpoint.hpp"
#include "ksnd/cli/errors.hpp"
#include "ksnd/states.hpp"

using namespace ksnd;
using namespace ksnd::cli;

namespace {

Checkpoint random_state(std::uint64_t seed) {
  const auto g = Grid::make(8, 5.5);
  Rng rng(seed);
  Checkpoint cp;
  cp.time = 1.25;
  cp.orbitals = {random_band_limited(g, rng), random_band_limited(g, rng)};
  cp.nuclei.positions = {{1.0, 2.0, 3.0}, {0.1, 0.2, 0.30000000000000004}};
  cp.nuclei.velocities = {{-1e-3, 0.0, 5e-4}, {0.0, 1e-300, 0.0}};
  cp.nuclei.masses = {1836.15267343, 3671.48};
  cp.nuclei.charges = {1, 2};
  return cp;
}

void expect_same(const Checkpoint& a, const Checkpoint& b) {
  EXPECT_EQ(std::memcmp(&a.time, &b.time, sizeof a.time), 0);
  EXPECT_EQ(a.nuclei.positions, b.nuclei.positions);
  EXPECT_EQ(a.nuclei.velocities, b.nuclei.velocities);
  EXPECT_EQ(a.nuclei.masses, b.nuclei.masses);
  EXPECT_EQ(a.nuclei.charges, b.nuclei.charges);
  ASSERT_EQ(a.orbitals.size(), b.orbitals.size());
  for (std::size_t j = 0; j < a.orbitals.size(); ++j) {
    EXPECT_TRUE(a.orbitals[j].grid() == b.orbitals[j].grid());
    const auto va = a.orbitals[j].values();
    const auto vb = b.orbitals[j].values();
    ASSERT_EQ(va.size(), vb.size());
    EXPECT_EQ(std::memcmp(va.data(), vb.data(), va.size() * sizeof(Complex)), 0);
  }
}

void expect_io_error(const std::vector<unsigned char>& bytes, const std::string& needle) {
  try {
    decode_checkpoint(bytes);
    FAIL() << "expected IoError containing '" << needle << "'";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

}  // namespace

TEST(Checkpoint, RoundTripIsBitExact) {
  const Checkpoint cp = random_state(1);
  const auto bytes = encode_checkpoint(cp);
  expect_same(cp, decode_checkpoint(bytes));
  EXPECT_EQ(encode_checkpoint(decode_checkpoint(bytes)), bytes);
}

TEST(Checkpoint, LayoutMatchesHeader) {
  const Checkpoint cp = random_state(2);
  const auto bytes = encode_checkpoint(cp);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "KSND");
  const std::size_t expect = 4 + 4 * 4 + 2 * 8 + 2 * (7 * 8 + 4) + 2 * 512 * 16 + 8;
  EXPECT_EQ(bytes.size(), expect);
  std::uint32_t v = 0;
  std::memcpy(&v, bytes.data() + 4, 4);
  EXPECT_EQ(v, checkpoint_version);
  std::uint64_t sum = 0;
  std::memcpy(&sum, bytes.data() + bytes.size() - 8, 8);
  EXPECT_EQ(sum, fnv1a64(bytes.data(), bytes.size() - 8));
}

TEST(Checkpoint, Fnv1aReferenceValues) {
  EXPECT_EQ(fnv1a64(nullptr, 0), 0xcbf29ce484222325ULL);
  const unsigned char a = 'a';
  EXPECT_EQ(fnv1a64(&a, 1), 0xaf63dc4c8601ec8cULL);
  const std::string foobar = "foobar";
  EXPECT_EQ(fnv1a64(reinterpret_cast<const unsigned char*>(foobar.data()), foobar.size()), 0x85944171f73967e8ULL);
}

TEST(Checkpoint, CorruptedByteRejected) {
  const auto good = encode_checkpoint(random_state(3));
  for (std::size_t pos : {std::size_t{30}, good.size() / 2, good.size() - 9, good.size() - 1}) {
    auto bad = good;
    bad[pos] ^= 0x10;
    expect_io_error(bad, "checksum");
  }
}

TEST(Checkpoint, WrongMagicRejected) {
  auto bad = encode_checkpoint(random_state(4));
  bad[0] = 'X';
  expect_io_error(bad, "magic");
}

TEST(Checkpoint, VersionMismatchRejected) {
  auto bad = encode_checkpoint(random_state(5));
  bad[4] = static_cast<unsigned char>(checkpoint_version + 1);
  expect_io_error(bad, "version");
}

TEST(Checkpoint, TruncationRejected) {
  const auto good = encode_checkpoint(random_state(6));
  for (std::size_t n : {std::size_t{0}, std::size_t{3}, std::size_t{20}, good.size() - 1}) {
    EXPECT_THROW(decode_checkpoint({good.begin(), good.begin() + static_cast<std::ptrdiff_t>(n)}), IoError) << n;
  }
}

TEST(Checkpoint, InconsistentHeaderRejectedEvenWithValidChecksum) {
  auto bytes = encode_checkpoint(random_state(7));
  bytes[8] = 16;  // grid.n
  bytes.resize(bytes.size() - 8);
  const std::uint64_t sum = fnv1a64(bytes.data(), bytes.size());
  const auto* p = reinterpret_cast<const unsigned char*>(&sum);
  bytes.insert(bytes.end(), p, p + 8);
  expect_io_error(bytes, "size does not match");
}

TEST(Checkpoint, FileRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "ksnd_checkpoint_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "state.ksnd").string();
  const Checkpoint cp = random_state(8);
  write_checkpoint(cp, path);
  expect_same(cp, read_checkpoint(path));
  EXPECT_THROW(read_checkpoint((dir / "missing.ksnd").string()), IoError);
  EXPECT_THROW(write_checkpoint(cp, (dir / "no/such/dir/x.ksnd").string()), IoError);
  std::filesystem::remove_all(dir);
}

TEST(Checkpoint, EmptyOrbitalsRejected) {
  Checkpoint cp = random_state(9);
  cp.orbitals.clear();
  EXPECT_THROW(encode_checkpoint(cp), IoError);
}
