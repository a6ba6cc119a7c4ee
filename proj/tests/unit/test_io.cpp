#include <filesystem>
#include <sstream>
#include <string>

#include "doctest.h"
#include "dunmix/dispersion.hpp"
#include "dunmix/endmember_fit.hpp"
#include "dunmix/errors.hpp"
#include "dunmix/fixtures.hpp"
#include "dunmix/io.hpp"
#include "golden_tables.hpp"

using namespace dunmix;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dunmix_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string error_of(const auto& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

struct GoldenRow {
  int axis, index;
  std::string omega0, gamma, rho, eps_r;
};

std::vector<GoldenRow> golden_rows(std::string_view text) {
  std::vector<GoldenRow> rows;
  std::istringstream in{std::string(text)};
  GoldenRow r;
  while (in >> r.axis >> r.index >> r.omega0 >> r.gamma >> r.rho >> r.eps_r) rows.push_back(r);
  return rows;
}

std::string_view golden_text(std::string_view name) {
  if (name == "olivine_fo10") return golden::k_olivine_fo10;
  if (name == "biotite") return golden::k_biotite;
  return golden::k_hematite;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("minimal two-row file") {
    const Spectrum s = parse_spectrum_csv("wavenumber,emissivity\n500,0.9\n600,0.95\n");
    CHECK(s.size() == 2);
    CHECK(s.grid()[1] == 600.0);
    CHECK(s[0] == 0.9);
    CHECK(s.measured());
  }

  TEST_CASE("descending grid is rejected") {
    const std::string msg = error_of([] { parse_spectrum_csv("wavenumber,emissivity\n600,0.9\n500,0.95\n", "d.csv"); });
    CHECK(msg.find("d.csv:3") != std::string::npos);
    CHECK(msg.find("ascending") != std::string::npos);
  }

  TEST_CASE("malformed rows report their line number") {
    CHECK(error_of([] { parse_spectrum_csv("wavenumber,emissivity\n500,0.9\n600,abc\n", "m.csv"); }).find("m.csv:3") !=
          std::string::npos);
    CHECK(error_of([] { parse_spectrum_csv("wavenumber,emissivity\n500,0.9,1\n", "m.csv"); }).find("m.csv:2") !=
          std::string::npos);
    CHECK(error_of([] { parse_spectrum_csv("freq,value\n500,0.9\n", "m.csv"); }).find("m.csv:1") != std::string::npos);
    CHECK_THROWS_AS(parse_spectrum_csv(""), InvalidInput);
  }

  TEST_CASE("rendered hematite spectrum round-trips bit-identically") {
    const fs::path dir = scratch_dir("roundtrip");
    const Spectrum s = render(load_fixture_params("hematite"), WavenumberGrid::uniform(200.0, 1400.0, 2.0));
    write_spectrum(s, dir / "h.csv");
    const Spectrum back = read_spectrum(dir / "h.csv", false);
    CHECK(back == s);
    write_spectrum(back, dir / "h2.csv");
    CHECK(read_text_file(dir / "h.csv") == read_text_file(dir / "h2.csv"));
  }

  TEST_CASE("missing file names the path") {
    const std::string msg = error_of([] { read_spectrum("/nonexistent/dir/x.csv"); });
    CHECK(msg.find("/nonexistent/dir/x.csv") != std::string::npos);
    CHECK_THROWS_AS(read_spectrum("/nonexistent/dir/x.csv"), IoError);
  }

  TEST_CASE("grid spec") {
    const WavenumberGrid g = parse_grid_spec("200:1400:2");
    CHECK(g.size() == 601);
    CHECK(g.front() == 200.0);
    CHECK(g.back() == 1400.0);
    CHECK_THROWS_AS(parse_grid_spec("200:1400"), InvalidInput);
    CHECK_THROWS_AS(parse_grid_spec("200:100:2"), InvalidInput);
    CHECK_THROWS_AS(parse_grid_spec("a:b:c"), InvalidInput);
  }

  TEST_CASE("params JSON round trip and defaults") {
    const DispersionParams p = load_fixture_params("olivine_fo10");
    CHECK(params_from_json(params_to_json(p)) == p);
    const DispersionParams noalpha = params_from_json(
        R"({"axes":[{"eps_r":2.0,"bands":[]},{"eps_r":3.0,"bands":[{"omega0":500,"gamma":0.1,"rho":0.2}]}]})");
    CHECK(noalpha.alpha()[0] == 0.5);
    CHECK(noalpha.alpha()[1] == 0.5);
    const std::string msg = error_of([] { params_from_json(R"({"axes":[{"eps_r":2.0,"bands":[],"colour":1}]})", "p.json"); });
    CHECK(msg.find("colour") != std::string::npos);
    CHECK_THROWS_AS(params_from_json(R"({"axes":[{"eps_r":0.5,"bands":[]}]})"), InvalidInput);
  }

  TEST_CASE("library JSON round trip and unknown fields") {
    const EndmemberLibrary lib = fixture_library(WavenumberGrid::uniform(200.0, 2000.0, 50.0));
    const EndmemberLibrary back = library_from_json(library_to_json(lib));
    REQUIRE(back.size() == lib.size());
    CHECK(back.grid() == lib.grid());
    for (std::size_t j = 0; j < lib.size(); ++j) {
      CHECK(back[j].name == lib[j].name);
      CHECK(back[j].params == lib[j].params);
      CHECK(back[j].box == lib[j].box);
    }
    CHECK(library_to_json(back) == library_to_json(lib));
    const std::string bad = R"({"schema_version":"1","grid":[1,2],"entries":[],"extra":true})";
    CHECK(error_of([&] { library_from_json(bad, "lib.json"); }).find("'extra'") != std::string::npos);
    const std::string ver = R"({"schema_version":"9","grid":[1,2],"entries":[]})";
    CHECK_THROWS_AS(library_from_json(ver), InvalidInput);
  }

  TEST_CASE("perturbation JSON round trip") {
    PerturbSpec s;
    s.omega0_shift = {-3.0, 4.5};
    s.rho_scale = {0.9, 1.1};
    s.within_box = true;
    s.seed = 99;
    const PerturbSpec b = perturb_from_json(perturb_to_json(s));
    CHECK(b.omega0_shift.lo == -3.0);
    CHECK(b.omega0_shift.hi == 4.5);
    CHECK(b.rho_scale.hi == 1.1);
    CHECK(b.within_box);
    CHECK(b.seed == 99);
    CHECK_THROWS_AS(perturb_from_json(R"({"sigma":[0,1]})"), InvalidInput);
  }

  TEST_CASE("sha256 known answers") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }

  TEST_CASE("double formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 8.0 / 9.0, 1e-300, 123456789.125}) CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_SUITE("fixtures") {
  TEST_CASE("every table row matches the reference transcription digit for digit") {
    for (const std::string& name : fixture_names()) {
      CAPTURE(name);
      const auto rows = fixture_rows(name);
      const auto golden = golden_rows(golden_text(name));
      REQUIRE(rows.size() == golden.size());
      const DispersionParams p = load_fixture_params(name);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        CAPTURE(i);
        CHECK(rows[i].axis == golden[i].axis);
        CHECK(rows[i].index == golden[i].index);
        CHECK(std::string(rows[i].omega0) == golden[i].omega0);
        CHECK(std::string(rows[i].gamma) == golden[i].gamma);
        CHECK(std::string(rows[i].rho) == golden[i].rho);
        CHECK(std::string(rows[i].eps_r) == golden[i].eps_r);
        const AxisParams& axis = p.axes()[static_cast<std::size_t>(golden[i].axis)];
        const Band& b = axis.bank()[static_cast<std::size_t>(golden[i].index)];
        CHECK(b.omega0 == std::stod(golden[i].omega0));
        CHECK(b.gamma == std::stod(golden[i].gamma));
        CHECK(b.rho == std::stod(golden[i].rho));
        CHECK(axis.eps_r() == std::stod(golden[i].eps_r));
      }
    }
  }

  TEST_CASE("row counts and spot values") {
    const DispersionParams h = load_fixture_params("hematite");
    REQUIRE(h.axis_count() == 2);
    CHECK(h.axes()[0].bank().size() == 22);
    CHECK(h.axes()[1].bank().size() == 17);
    const Band hb = h.axes()[1].bank()[2];
    CHECK(hb.omega0 == 312.13);
    CHECK(hb.gamma == 0.09);
    CHECK(hb.rho == 0.255);
    CHECK(h.axes()[1].eps_r() == 1.25);

    const DispersionParams o = load_fixture_params("olivine_fo10");
    CHECK(o.axes()[0].bank().size() == 20);
    CHECK(o.axes()[1].bank().size() == 11);
    const Band ob = o.axes()[0].bank()[4];
    CHECK(ob.omega0 == 361.06);
    CHECK(ob.gamma == 0.067);
    CHECK(ob.rho == 0.187);
    CHECK(o.axes()[0].eps_r() == 1.07);

    const DispersionParams b = load_fixture_params("biotite");
    CHECK(b.axes()[0].eps_r() == 1.31);
    CHECK(b.axes()[1].eps_r() == 2.61);
    for (const auto* p : {&h, &o, &b}) {
      for (double a : p->alpha()) CHECK(a == 0.5);
    }
  }

  TEST_CASE("unknown fixture name") { CHECK_THROWS_AS(load_fixture_params("quartz"), InvalidInput); }
}
