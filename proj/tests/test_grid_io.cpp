#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "q3p/error.hpp"
#include "q3p/grid_io.hpp"

using namespace q3p;

namespace {

std::string dx_text(std::size_t nvalues) {
  std::ostringstream s;
  s << "# test grid\n"
    << "object 1 class gridpositions counts 3 4 5\n"
    << "origin -1.5 0 2.25\n"
    << "delta 0.5 0 0\n"
    << "delta 0 0.5 0\n"
    << "delta 0 0 0.25\n"
    << "object 2 class gridconnections counts 3 4 5\n"
    << "object 3 class array type double rank 0 items 60 data follows\n";
  for (std::size_t i = 0; i < nvalues; ++i) s << 0.125 * static_cast<double>(i) << ((i % 3 == 2) ? "\n" : " ");
  s << "\nattribute \"dep\" string \"positions\"\n";
  return s.str();
}

}  // namespace

TEST_CASE("dx reader parses the supported subset") {
  std::istringstream in(dx_text(60));
  const auto f = read_dx(in);
  CHECK(f.shape() == std::vector<std::size_t>{3, 4, 5});
  CHECK(f.spacing() == std::vector<double>{0.5, 0.5, 0.25});
  CHECK(f.origin() == std::vector<double>{-1.5, 0.0, 2.25});
  CHECK(f.at(0, 0, 1) == 0.125);
  CHECK(f.at(2, 3, 4) == 0.125 * 59);
}

TEST_CASE("dx reader reports a value-count mismatch") {
  std::istringstream in(dx_text(59));
  CHECK_THROWS_AS(read_dx(in, "short.dx"), ParseError);
}

TEST_CASE("dx reader reports malformed headers with a line number") {
  std::string text = dx_text(60);
  text.replace(text.find("delta 0 0.5 0"), 13, "delta 0 0.5 1");
  std::istringstream in(text);
  try {
    read_dx(in, "skew.dx");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
  }
  std::string zero = dx_text(60);
  zero.replace(zero.find("delta 0.5 0 0"), 13, "delta 0.0 0 0");
  std::istringstream in2(zero);
  CHECK_THROWS_AS(read_dx(in2), ParseError);
  std::istringstream junk("hello world\n");
  CHECK_THROWS_AS(read_dx(junk), ParseError);
}

TEST_CASE("grid files round-trip bit-exactly") {
  std::vector<double> v(60);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.37 * static_cast<double>(i)) * 1e-3 + 1.0 / 3.0;
  const ScalarField f(GridGeometry{{3, 4, 5}, {0.5, 0.25, 0.1}, {-1.0, 2.0, 0.3}}, v);
  const auto dir = std::filesystem::temp_directory_path() / "q3p_grid_io_test";
  std::filesystem::create_directories(dir);
  for (const char* name : {"g.dx", "g.json"}) {
    const auto path = dir / name;
    save_grid(f, path);
    const auto back = load_grid(path);
    CHECK(back.shape() == f.shape());
    CHECK(back.spacing() == f.spacing());
    CHECK(back.origin() == f.origin());
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(back.values()[i] == v[i]);
    save_grid(back, dir / (std::string("again_") + name));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("json grids") {
  const auto j = nlohmann::json::parse(R"({"dims": 3, "shape": [2, 2, 2], "spacing": [1, 1, 1],
                                           "origin": [0, 0, 0], "values": [1, 1, 1, 1, 1, 1, 1, 1]})");
  const auto f = field_from_json(j);
  CHECK(f.size() == 8);
  CHECK(f.integral() == doctest::Approx(1.0));
  auto bad = j;
  bad["values"].erase(0);
  CHECK_THROWS_AS(field_from_json(bad), ParseError);
  auto neg = j;
  neg["spacing"][1] = -1.0;
  CHECK_THROWS_AS(field_from_json(neg), ParseError);
  CHECK_THROWS_AS(grid_format_from_path("x.txt"), InvalidArgument);
}
