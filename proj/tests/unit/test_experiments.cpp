#include <filesystem>

#include "doctest.h"
#include "frackin/config.hpp"
#include "frackin/errors.hpp"
#include "frackin/experiments.hpp"
#include "frackin/io.hpp"
#include "ini.hpp"

using namespace frackin;
namespace fs = std::filesystem;

TEST_CASE("small E1 run writes a verifiable manifest") {
    auto c = parse_config(reference_ini());
    auto dir = fs::temp_directory_path() / "frackin_unit_e1";
    fs::remove_all(dir);
    auto r = run_experiment(c, dir);
    CHECK_FALSE(r.checks.empty());
    CHECK(fs::exists(dir / "manifest.txt"));
    auto m = parse_manifest(read_text(dir / "manifest.txt"));
    CHECK(m.command == "E1");
    CHECK(m.derived.count("nu") == 1);
    CHECK(m.outputs.size() == r.outputs.size());
    auto v = verify_manifest(dir);
    CHECK(v.ok);
    for (const auto& s : v.mismatches) MESSAGE(s);
}

TEST_CASE("small E2 run passes its bounds") {
    auto c = parse_config(reference_ini(), {"experiment.id=E2", "scaling.eps=0.1", "output.snapshots=false"});
    auto dir = fs::temp_directory_path() / "frackin_unit_e2";
    fs::remove_all(dir);
    auto r = run_experiment(c, dir);
    for (const auto& ch : r.checks) {
        CAPTURE(ch.name);
        CAPTURE(ch.detail);
        if (ch.name.find("exponent") == std::string::npos) CHECK(ch.pass);
    }
}

TEST_CASE("invalid parameters and ids are refused") {
    auto dir = fs::temp_directory_path() / "frackin_unit_bad";
    CHECK_THROWS_AS(run_experiment(parse_config(reference_ini(), {"coefficients.s_exp=1.2"}), dir), InputError);
    CHECK_THROWS_AS(run_experiment(parse_config(reference_ini(), {"experiment.id=E9"}), dir), InputError);
    CHECK_THROWS_AS(run_experiment(parse_config(reference_ini(), {"experiment.id=E3", "run.N=10"}), dir), InputError);
}
