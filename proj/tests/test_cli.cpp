#include "affrep/representability.hpp"
#include "affrep/serialize.hpp"
#include "cli.hpp"

#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace affrep;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

// Fresh scratch directory per test case.
struct Scratch {
    fs::path dir;
    Scratch() {
        static int counter = 0;
        dir = fs::temp_directory_path() /
              ("affrep_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    std::string operator/(const std::string& f) const { return (dir / f).string(); }
};

std::string remark6_file(const Scratch& s) {
    const std::string p = s / "r6.json";
    write(p, json::dump(json::to_json(remark6_operator())));
    return p;
}

}  // namespace

TEST_CASE("cli gen") {
    Scratch s;
    REQUIRE(run({"gen", "--dim", "3", "--class", "ricci-flat", "--seed", "7", "-o", s / "a.json"}).code == 0);
    REQUIRE(run({"gen", "--dim", "3", "--class", "ricci-flat", "--seed", "7", "-o", s / "b.json"}).code == 0);
    const std::string a = slurp(s / "a.json");
    CHECK(a == slurp(s / "b.json"));
    CHECK(json::dump(json::to_json(json::operator_from_json(json::Json::parse(a)))) == a);
    CHECK(json::operator_from_json(json::Json::parse(a)) == random_operator(3, OperatorClass::RicciFlat, 7));

    const auto bad = run({"gen", "--dim", "2", "--class", "ricci-flat"});
    CHECK(bad.code == cli::kBadArguments);
    CHECK(bad.err.find("m >= 3") != std::string::npos);

    CHECK(run({"gen", "--dim", "3", "--class", "nonsense", "-o", s / "c.json"}).code == cli::kBadArguments);
    CHECK(run({"gen", "--class", "generic"}).code == cli::kBadArguments);
    CHECK(run({}).code == cli::kBadArguments);
    CHECK(run({"gen", "--dim", "3", "--class", "generic", "-o", "-"}).out.find("\"components\"") != std::string::npos);
}

TEST_CASE("cli output directory from the environment") {
    Scratch s;
    ::setenv(cli::kOutputDirEnv, (s / "outdir").c_str(), 1);
    const auto r = run({"gen", "--dim", "3", "--class", "generic", "--seed", "1"});
    ::unsetenv(cli::kOutputDirEnv);
    REQUIRE(r.code == 0);
    CHECK(fs::exists(s / "outdir/operator_generic_m3_s1.json"));
}

TEST_CASE("cli represent") {
    Scratch s;
    const std::string r6 = remark6_file(s);

    const auto t4 = run({"represent", "--method", "thm4", "-i", r6, "-o", s / "t4.json"});
    CHECK(t4.code == cli::kClassViolation);
    CHECK(t4.err.find("(1,2,1,2)") != std::string::npos);
    CHECK_FALSE(fs::exists(s / "t4.json"));

    write(s / "zero.json", json::dump(json::to_json(CurvatureOperator(3))));
    REQUIRE(run({"represent", "--method", "thm1", "-i", s / "zero.json", "-o", s / "z.json"}).code == 0);
    const auto z = json::connection_from_json(json::Json::parse(slurp(s / "z.json")));
    CHECK(z.is_zero());
    CHECK(json::Json::parse(slurp(s / "z.json"))["gamma"].empty());

    REQUIRE(run({"represent", "--method", "thm5", "-N", "3", "-i", r6, "-o", s / "t5.json"}).code == 0);
    REQUIRE(fs::exists(s / "t5.series.json"));
    const auto series = json::series_from_json(json::Json::parse(slurp(s / "t5.series.json")));
    CHECK(series.order() == 3);
    CHECK(json::connection_from_json(json::Json::parse(slurp(s / "t5.json"))) == series.truncation());
    const auto v = run({"verify", "-i", s / "t5.json", "--checks", "ricci-order:6"});
    CHECK(v.code == 0);
    CHECK(v.out.find("ricci_order_6: true") != std::string::npos);

    CHECK(run({"represent", "--method", "thm9", "-i", r6}).code == cli::kBadArguments);
    CHECK(run({"represent", "--method", "thm1", "-i", s / "missing.json"}).code == cli::kIoError);
    write(s / "garbage.json", "{not json");
    CHECK(run({"represent", "--method", "thm1", "-i", s / "garbage.json"}).code == cli::kBadArguments);
}

TEST_CASE("cli verify") {
    Scratch s;
    REQUIRE(run({"gen", "--dim", "4", "--class", "generic", "--seed", "3", "-o", s / "g.json"}).code == 0);
    REQUIRE(run({"represent", "--method", "thm1", "-i", s / "g.json", "-o", s / "g1.json"}).code == 0);
    const auto m = run({"verify", "-i", s / "g1.json", "--checks", "matches:" + s / "g.json", "-o", s / "rep.json"});
    CHECK(m.code == 0);
    const auto rep = json::report_from_json(json::Json::parse(slurp(s / "rep.json")));
    REQUIRE(rep.find("matches_operator") != nullptr);
    CHECK(rep.find("matches_operator")->pass);

    REQUIRE(run({"gen", "--dim", "3", "--class", "equiaffine", "--seed", "5", "-o", s / "e.json"}).code == 0);
    REQUIRE(run({"represent", "--method", "thm3", "-i", s / "e.json", "-o", s / "e3.json"}).code == 0);
    const auto l = run({"verify", "-i", s / "e3.json", "--checks", "lemma2"});
    CHECK(l.code == 0);
    for (const char* c : {"closed_omega", "traceless_curvature", "ricci_symmetric", "parallel_volume_form"}) {
        CHECK(l.out.find(std::string("lemma2.") + c + ": true") != std::string::npos);
    }

    const std::string r6 = remark6_file(s);
    REQUIRE(run({"represent", "--method", "thm5", "-N", "2", "-i", r6, "-o", s / "t5.json"}).code == 0);
    CHECK(run({"verify", "-i", s / "t5.json", "--checks", "ricci-order:4"}).code == 0);

    // the naive construction is not Ricci flat: exit 4 with a witness
    REQUIRE(run({"represent", "--method", "thm1", "-i", r6, "-o", s / "n.json"}).code == 0);
    const auto f = run({"verify", "-i", s / "n.json", "--checks", "ricci-flat,ricci-order:3"});
    CHECK(f.code == cli::kCheckFailed);
    CHECK(f.out.find("ricci_flat: false  [at (1,1) monomial x1^2 value -2/9]") != std::string::npos);
    CHECK(f.out.find("ricci_order_3: false") != std::string::npos);

    // a wrong expected operator fails with the first differing component
    write(s / "zero.json", json::dump(json::to_json(CurvatureOperator(3))));
    const auto w = run({"verify", "-i", s / "n.json", "--checks", "matches:" + s / "zero.json"});
    CHECK(w.code == cli::kCheckFailed);
    CHECK(w.out.find("matches_operator: false  [at (1,2,1,2)") != std::string::npos);

    CHECK(run({"verify", "-i", s / "t5.json", "--max-degree", "1"}).code == cli::kBadArguments);
    CHECK(run({"verify", "-i", s / "t5.json", "--max-degree", "3", "--checks", "ricci-order:4"}).code == 0);
    CHECK(run({"verify", "-i", s / "t5.json", "--checks", "bogus"}).code == cli::kBadArguments);
    CHECK(run({"verify", "-i", s / "t5.json", "--checks", "ricci-order:x"}).code == cli::kBadArguments);
    CHECK(run({"verify", "-i", s / "absent.json"}).code == cli::kIoError);

    // operator inputs
    CHECK(run({"verify", "-i", r6, "--checks", "symmetries,class:ricci-flat,class:equiaffine"}).code == 0);
    const auto pf = run({"verify", "-i", r6, "--checks", "class:proj-flat"});
    CHECK(pf.code == cli::kCheckFailed);
    CHECK(pf.out.find("class_proj-flat: false") != std::string::npos);
}

TEST_CASE("cli batch verify matches sequential") {
    Scratch s;
    fs::create_directories(s / "ops");
    for (int seed = 0; seed < 8; ++seed) {
        const char* cls = seed % 2 ? "equiaffine" : "generic";
        REQUIRE(run({"gen", "--dim", "3", "--class", cls, "--seed", std::to_string(seed), "-o",
                     s / ("ops/op" + std::to_string(seed) + ".json")})
                    .code == 0);
    }
    const auto seq = run({"verify", "-i", s / "ops", "--checks", "symmetries,class:equiaffine", "-o", s / "seq.json"});
    const auto par = run({"verify", "-i", s / "ops", "--checks", "symmetries,class:equiaffine", "-j", "4", "-o",
                          s / "par.json"});
    CHECK(seq.code == par.code);
    CHECK(seq.out == par.out);
    CHECK(slurp(s / "seq.json") == slurp(s / "par.json"));
    CHECK(seq.out.find("op0.json:antisymmetry: true") != std::string::npos);
    CHECK(seq.out.find("files: 8") != std::string::npos);
    CHECK(run({"verify", "-i", s / "ops", "-j", "3"}).code == 0);
}

TEST_CASE("cli decompose") {
    Scratch s;
    const std::string r6 = remark6_file(s);
    REQUIRE(run({"decompose", "-i", r6, "-o", s / "r6"}).code == 0);
    CHECK(json::operator_from_json(json::Json::parse(slurp(s / "r6.ricci_part.json"))).is_zero());
    CHECK(json::operator_from_json(json::Json::parse(slurp(s / "r6.weyl_part.json"))) == remark6_operator());

    write(s / "block.json", json::dump(json::to_json(ricci_block(random_symmetric_matrix(4, 9)))));
    REQUIRE(run({"decompose", "-i", s / "block.json", "-o", s / "b"}).code == 0);
    CHECK(json::operator_from_json(json::Json::parse(slurp(s / "b.weyl_part.json"))).is_zero());

    REQUIRE(run({"gen", "--dim", "4", "--class", "equiaffine", "--seed", "2", "-o", s / "e.json"}).code == 0);
    const auto d = run({"decompose", "-i", s / "e.json", "-o", s / "e"});
    CHECK(d.code == 0);
    CHECK(d.out.find("reconstitution: true") != std::string::npos);
    const auto sum = json::operator_from_json(json::Json::parse(slurp(s / "e.ricci_part.json"))) +
                     json::operator_from_json(json::Json::parse(slurp(s / "e.weyl_part.json")));
    CHECK(sum == json::operator_from_json(json::Json::parse(slurp(s / "e.json"))));

    CurvatureOperator generic;
    for (std::uint64_t seed = 0;; ++seed) {
        generic = random_operator(3, OperatorClass::Generic, seed);
        if (!is_equiaffine(generic)) break;
    }
    write(s / "g.json", json::dump(json::to_json(generic)));
    CHECK(run({"decompose", "-i", s / "g.json", "-o", s / "g"}).code == cli::kClassViolation);
}

TEST_CASE("cli estimate") {
    Scratch s;
    write(s / "r6s.json", json::dump(json::to_json(ricci_flat_series(remark6_operator(), 6))));
    const auto e = run({"estimate", "-i", s / "r6s.json", "--samples", "300", "--seed", "4", "-o", s / "e1.json"});
    CHECK(e.code == 0);
    CHECK(e.out.find("violations: 0") != std::string::npos);
    REQUIRE(run({"estimate", "-i", s / "r6s.json", "--samples", "300", "--seed", "4", "-o", s / "e2.json"}).code == 0);
    CHECK(slurp(s / "e1.json") == slurp(s / "e2.json"));
    const auto report = json::Json::parse(slurp(s / "e1.json"));
    CHECK(report["per_layer"].size() == 6);
    CHECK(report["C1"] == 2.0);

    write(s / "zs.json", json::dump(json::to_json(ricci_flat_series(CurvatureOperator(3), 3))));
    REQUIRE(run({"estimate", "-i", s / "zs.json", "-o", s / "z.json"}).code == 0);
    const auto zero = json::Json::parse(slurp(s / "z.json"));
    for (const auto& l : zero["per_layer"]) CHECK(l["max_ratio"] == 0.0);

    write(s / "one.json", json::dump(json::to_json(ricci_flat_series(remark6_operator(), 1))));
    CHECK(run({"estimate", "-i", s / "one.json"}).code == cli::kBadArguments);
}

TEST_CASE("cli demo, equiaffine conditions and dims") {
    Scratch s;
    const auto d = run({"demo-remark6"});
    CHECK(d.code == 0);
    CHECK(d.out.find("naive_ricci_nonzero: true") != std::string::npos);
    CHECK(d.out.find("naive_ricci_coefficient_magnitude: 2/9") != std::string::npos);
    CHECK(d.out.find("operator_ricci_flat: true") != std::string::npos);
    CHECK(d.out.find("corrected_ricci_order_N2: true") != std::string::npos);
    CHECK(run({"demo-remark6", "-N", "2", "-o", s / "demo.json"}).code == 0);
    const auto demo = json::report_from_json(json::Json::parse(slurp(s / "demo.json")));
    const auto order = demo.fact_value("corrected_ricci_order_N2");
    REQUIRE(order.has_value());
    CHECK((*order == "inf" || std::stoi(*order) >= 4));

    // a connection with non-closed omega: every condition false, still agreeing
    PolyConnection c(2);
    c.set(0, 0, 1, Poly::variable(2, 0));
    c.set(0, 1, 0, Poly::variable(2, 0));
    write(s / "c.json", json::dump(json::to_json(c)));
    const auto l = run({"lemma2", "-i", s / "c.json"});
    CHECK(l.code == 0);
    CHECK(l.out.find("closed_omega: false") != std::string::npos);
    CHECK(l.out.find("conditions_agree: true") != std::string::npos);
    CHECK(l.out.find("equiaffine: false") != std::string::npos);

    const auto dims = run({"dims", "--dim", "3"});
    CHECK(dims.code == 0);
    CHECK(dims.out == "m generic equiaffine proj-flat ricci-flat\n3 24 21 6 15\n");
    CHECK(run({"dims", "--dim", "9"}).code == cli::kBadArguments);
}
