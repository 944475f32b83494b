#include <filesystem>
#include <fstream>
#include <sstream>

#include "paritysim/io.hpp"
#include "support.hpp"

using namespace paritysim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "paritysim_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("number formatting round-trips") {
  for (double x : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0}) {
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(sidecar_path("out/wigner_map.csv") == fs::path("out/wigner_map.meta.json"));
}

TEST_CASE("tomogram files") {
  const PhaseGrid grid = PhaseGrid::square(1.5, 7);
  Tomogram t = synthesize_tomogram(DensityMatrix::fock(1, FockSpace(8)), 0.78, 0.84, grid, 300, 4);
  t.cross_check = TomogramCrossCheck{0.25, 0.39, 1.0};
  const fs::path path = scratch("tomogram.csv");
  write_tomogram(path, t, Json{{"note", "x"}});
  CHECK(slurp(path).rfind("I,Q,value,shots\n", 0) == 0);
  const Json meta = read_json(sidecar_path(path));
  CHECK(meta["seed"] == 4);
  CHECK(meta["note"] == "x");

  const Tomogram back = read_tomogram(path);
  CHECK(back.values == t.values);
  CHECK(back.shots == t.shots);
  CHECK(back.eta == t.eta);
  CHECK(back.f_mm == t.f_mm);
  CHECK(back.grid.size() == grid.size());
  CHECK(back.forward_model == t.forward_model);
  REQUIRE(back.cross_check.has_value());
  CHECK(back.cross_check->convolution_normalization == 0.39);

  SUBCASE("noiseless tomograms leave shots empty") {
    const Tomogram ideal = synthesize_tomogram(DensityMatrix::fock(0, FockSpace(4)), 1.0, 1.0, grid, std::nullopt, 1);
    const fs::path p2 = scratch("ideal.csv");
    write_tomogram(p2, ideal);
    CHECK_FALSE(read_tomogram(p2).shots.has_value());
    write_tomogram(p2, ideal);
    const std::string first = slurp(p2);
    write_tomogram(p2, ideal);
    CHECK(slurp(p2) == first);
  }
}

TEST_CASE("moment table and record files") {
  MomentTable t = exact_moment_table(DensityMatrix::pure(coherent_state(Complex(0.4, 0.2), FockSpace(12))), 3);
  const fs::path p = scratch("moments.csv");
  write_moment_table(p, t);
  CHECK(slurp(p).rfind("n,m,re,im,stderr\n", 0) == 0);
  const MomentTable back = read_moment_table(p);
  CHECK(back.order == 3);
  CHECK(back.values == t.values);
  CHECK(back.std_errors == t.std_errors);

  const auto recs = simulate_heterodyne(DensityMatrix::fock(1, FockSpace(3)), NoiseModel{}, 100, 5);
  const fs::path r = scratch("records.csv");
  write_records(r, recs);
  CHECK(slurp(r).rfind("shot,i,q,qubit_q\n", 0) == 0);
  const auto rb = read_records(r);
  REQUIRE(rb.size() == recs.size());
  for (std::size_t k = 0; k < rb.size(); ++k) {
    CHECK(rb[k].shot == recs[k].shot);
    CHECK(rb[k].i == recs[k].i);
    CHECK(rb[k].q == recs[k].q);
  }
}

TEST_CASE("read errors") {
  CHECK(error_kind([] { read_tomogram(scratch("missing.csv")); }) == ErrorKind::IoError);
  const fs::path p = scratch("bad.csv");
  std::ofstream(p) << "a,b\n1,2\n";
  CHECK(error_kind([&] { read_records(p); }) == ErrorKind::IoError);
}
