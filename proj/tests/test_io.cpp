#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "jgecert/error.hpp"
#include "jgecert/tensor_io.hpp"

using namespace jgecert;

TEST(TensorIo, RoundTripIsExact) {
  SeededRng rng(1);
  const Tensor3 t = random_normal_tensor(rng, {3, 4, 2});
  std::stringstream ss;
  io::write_tensor(ss, t);
  const Tensor3 back = io::read_tensor(ss);
  EXPECT_EQ(back.dims(), t.dims());
  EXPECT_EQ(back.values(), t.values());
}

TEST(TensorIo, HeaderAndLayout) {
  Tensor3 t(2, 1, 2);
  t(1, 0, 1) = 4.5;
  std::stringstream ss;
  io::write_tensor(ss, t);
  std::string header, v0, v1, v2, v3;
  ss >> header >> v0 >> v1 >> v2 >> v3;
  EXPECT_EQ(header, "dims,2,1,2");
  EXPECT_EQ(v3, "4.5");
}

TEST(TensorIo, CommentsAndBlankLinesIgnored) {
  std::stringstream ss("# a comment\ndims,1,1,2\n\n1\n# mid\n2\n");
  const Tensor3 t = io::read_tensor(ss);
  EXPECT_EQ(t(0, 0, 1), 2.0);
}

TEST(TensorIo, MalformedInputsThrow) {
  for (const char* bad : {"", "dims,2,2\n1\n", "dims,1,1,1\nabc\n", "dims,1,1,2\n1\n", "dims,1,1,1\n1\n2\n",
                          "matrix,1,1\n1\n", "dims,0,1,1\n"}) {
    std::stringstream ss(bad);
    EXPECT_THROW(io::read_tensor(ss), ParseError) << bad;
  }
}

TEST(TensorIo, FactorsAndMatrixRoundTrip) {
  SeededRng rng(2);
  const FactorTriple f{rng.normal_matrix(3, 2), rng.normal_matrix(4, 2), rng.normal_matrix(5, 2)};
  std::stringstream ss;
  io::write_factors(ss, f);
  const FactorTriple g = io::read_factors(ss);
  EXPECT_EQ(g.A, f.A);
  EXPECT_EQ(g.B, f.B);
  EXPECT_EQ(g.C, f.C);
  std::stringstream ms;
  io::write_matrix(ms, f.C);
  EXPECT_EQ(io::read_matrix(ms), f.C);
}

TEST(TensorIo, FilesAreByteIdenticalForSameSeed) {
  const auto dir = std::filesystem::temp_directory_path() / "jgecert_io_test";
  std::filesystem::create_directories(dir);
  SeededRng a(5), b(5);
  io::save_tensor(dir / "a.txt", random_normal_tensor(a, {2, 3, 4}));
  io::save_tensor(dir / "b.txt", random_normal_tensor(b, {2, 3, 4}));
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(is), {});
  };
  EXPECT_EQ(slurp(dir / "a.txt"), slurp(dir / "b.txt"));
  EXPECT_THROW(io::load_tensor(dir / "missing.txt"), ParseError);
  std::filesystem::remove_all(dir);
}
