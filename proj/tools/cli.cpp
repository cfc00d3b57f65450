#include "cli.hpp"

#include "affrep/connection.hpp"
#include "affrep/curvature_space.hpp"
#include "affrep/error.hpp"
#include "affrep/representability.hpp"
#include "affrep/serialize.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

namespace affrep::cli {

namespace {

namespace fs = std::filesystem;
using json::Json;

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

fs::path output_dir() {
    const char* d = std::getenv(kOutputDirEnv);
    return (d != nullptr && *d != '\0') ? fs::path(d) : fs::path(".");
}

// An empty path means "use the default name in the output directory".
fs::path resolve(const std::string& given, const std::string& default_name) {
    return given.empty() ? output_dir() / default_name : fs::path(given);
}

Json read_json(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw IoError("cannot open '" + p.string() + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(p.string() + ": " + e.what());
    }
}

// "-" writes to `out` instead of a file.
void emit(const fs::path& p, const std::string& text, std::ostream& out) {
    if (p == "-") {
        out << text;
        return;
    }
    if (p.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
    }
    std::ofstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot write '" + p.string() + "'");
    f << text;
    if (!f.flush()) throw IoError("cannot write '" + p.string() + "'");
}

std::string stem(const std::string& path) { return fs::path(path).stem().string(); }

std::vector<int> one_based(std::initializer_list<std::size_t> idx) {
    std::vector<int> v;
    for (auto i : idx) v.push_back(static_cast<int>(i + 1));
    return v;
}

std::optional<Witness> first_nonzero(const CurvatureField& f) {
    const std::size_t m = f.dim();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t l = 0; l < m; ++l) {
                    const Poly& p = f(i, j, k, l);
                    if (p.is_zero()) continue;
                    const Term& t = p.terms().front();
                    return Witness{one_based({i, j, k, l}),
                                   Poly::monomial(m, t.monomial.exponents(m), Rational(1)).to_string(),
                                   to_string(t.coef)};
                }
    return std::nullopt;
}

std::optional<Witness> first_difference(const CurvatureOperator& got, const CurvatureOperator& want) {
    const std::size_t m = got.dim();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t l = 0; l < m; ++l)
                    if (got(i, j, k, l) != want(i, j, k, l)) {
                        return Witness{one_based({i, j, k, l}), "1",
                                       to_string(got(i, j, k, l)) + " (expected " + to_string(want(i, j, k, l)) + ")"};
                    }
    return std::nullopt;
}

std::optional<Witness> first_nonzero(const RationalMatrix& a) {
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (a(i, j) != 0) return Witness{one_based({i, j}), "", to_string(a(i, j))};
    return std::nullopt;
}

std::optional<Witness> first_nonzero(const CurvatureOperator& a) {
    return first_difference(a, CurvatureOperator(a.dim()));
}

// ---------------------------------------------------------------- verify

enum class InputKind { Operator, Connection };

InputKind detect(const Json& j) {
    if (j.is_object() && j.contains("gamma")) return InputKind::Connection;
    if (j.is_object() && j.contains("components")) return InputKind::Operator;
    throw ParseError("input is neither an operator nor a connection");
}

struct VerifyOptions {
    std::vector<std::string> checks;
    int max_degree = -1;
};

void check_ricci_order(VerificationReport& r, const PolyConnection& c, unsigned n) {
    const PolyMatrix rho = ricci_field(c);
    const int order = rho.vanishing_order();
    r.fact("ricci_vanishing_order", order == kInfiniteOrder ? "inf" : std::to_string(order));
    PolyMatrix low(c.dim());
    for (std::size_t i = 0; i < c.dim(); ++i)
        for (std::size_t j = 0; j < c.dim(); ++j) low(i, j) = rho(i, j) - rho(i, j).truncate_below_degree(n);
    const auto w = first_nonzero(low);
    r.record("ricci_order_" + std::to_string(n), !w, w.value_or(Witness{}));
}

void verify_connection(VerificationReport& r, const PolyConnection& c, const std::string& check) {
    const auto colon = check.find(':');
    const std::string kind = check.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : check.substr(colon + 1);
    if (kind == "matches") {
        if (arg.empty()) throw InvalidArgument("matches needs an operator file, as matches:FILE");
        const auto want = json::operator_from_json(read_json(arg));
        if (want.dim() != c.dim()) throw InvalidArgument("expected operator has the wrong dimension");
        const auto w = first_difference(curvature_at_origin(c), want);
        r.record("matches_operator", !w, w.value_or(Witness{}));
    } else if (kind == "lemma2") {
        r.merge(lemma2_report(c), "lemma2.");
    } else if (kind == "ricci-order") {
        unsigned n = 0;
        try {
            n = static_cast<unsigned>(std::stoul(arg));
        } catch (const std::exception&) {
            throw InvalidArgument("ricci-order needs a number, as ricci-order:N");
        }
        check_ricci_order(r, c, n);
    } else if (kind == "ricci-flat") {
        const auto w = affrep::first_nonzero(ricci_field(c));
        r.record("ricci_flat", !w, w.value_or(Witness{}));
    } else if (kind == "closed-omega") {
        const auto w = affrep::first_nonzero(d_omega(c));
        r.record("closed_omega", !w, w.value_or(Witness{}));
    } else if (kind == "proj-flat") {
        const auto w = first_nonzero(weyl_projective_field(c));
        r.record("proj_flat", !w, w.value_or(Witness{}));
    } else {
        throw InvalidArgument("unknown connection check '" + check +
                              "' (expected matches:FILE, lemma2, ricci-order:N, ricci-flat, closed-omega, proj-flat)");
    }
}

void verify_operator(VerificationReport& r, const CurvatureOperator& a, const std::string& check) {
    if (check == "symmetries") {
        r.merge(validate(a));
        return;
    }
    if (check.rfind("class:", 0) != 0) {
        throw InvalidArgument("unknown operator check '" + check + "' (expected symmetries, class:NAME)");
    }
    const auto cls = parse_operator_class(check.substr(6));
    const std::string name = "class_" + std::string(to_string(cls));
    const RationalMatrix rho = ricci(a);
    const auto asym = first_nonzero(RationalMatrix(rho.transpose() - rho));
    switch (cls) {
        case OperatorClass::Generic: {
            const auto v = validate(a);
            const Check* bad = nullptr;
            for (const auto& c : v.checks())
                if (!c.pass && bad == nullptr) bad = &c;
            r.record(name, bad == nullptr, bad != nullptr && bad->witness ? *bad->witness : Witness{});
            break;
        }
        case OperatorClass::Equiaffine:
            r.record(name, !asym, asym.value_or(Witness{}));
            break;
        case OperatorClass::RicciFlat: {
            const auto w = first_nonzero(rho);
            r.record(name, !w, w.value_or(Witness{}));
            break;
        }
        case OperatorClass::ProjectivelyFlat: {
            if (asym) {
                r.fail(name, *asym);
            } else {
                const auto w = first_nonzero(weyl_projective(a));
                r.record(name, !w, w.value_or(Witness{}));
            }
            break;
        }
    }
}

VerificationReport verify_file(const fs::path& path, const VerifyOptions& opt) {
    const Json j = read_json(path);
    VerificationReport r;
    if (detect(j) == InputKind::Connection) {
        const auto c = json::connection_from_json(j);
        r.metadata().dim = c.dim();
        if (opt.max_degree >= 0 && c.max_degree() > opt.max_degree) {
            throw InvalidArgument("connection has degree " + std::to_string(c.max_degree()) +
                                  ", above --max-degree " + std::to_string(opt.max_degree));
        }
        const std::vector<std::string> checks = opt.checks.empty() ? std::vector<std::string>{"lemma2"} : opt.checks;
        for (const auto& ch : checks) verify_connection(r, c, ch);
    } else {
        const auto a = json::operator_from_json(j);
        r.metadata().dim = a.dim();
        const std::vector<std::string> checks =
            opt.checks.empty() ? std::vector<std::string>{"symmetries"} : opt.checks;
        for (const auto& ch : checks) verify_operator(r, a, ch);
    }
    return r;
}

VerificationReport verify_directory(const fs::path& dir, const VerifyOptions& opt, unsigned jobs) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());

    std::vector<VerificationReport> results(files.size());
    std::vector<std::exception_ptr> errors(files.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < files.size(); t = next++) {
            try {
                results[t] = verify_file(files[t], opt);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(files.size())));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    VerificationReport all;
    for (std::size_t t = 0; t < files.size(); ++t) {
        if (errors[t]) std::rethrow_exception(errors[t]);
        all.merge(results[t], files[t].filename().string() + ":");
    }
    all.fact("files", std::to_string(files.size()));
    return all;
}

// ---------------------------------------------------------------- commands

struct Args {
    // gen
    std::size_t dim = 3;
    std::string cls = "generic";
    std::uint64_t seed = 0;
    // shared
    std::string in;
    std::string out;
    // represent
    std::string method = "thm1";
    std::size_t order = 2;
    std::size_t demo_order = 4;
    // verify
    std::vector<std::string> checks;
    int max_degree = -1;
    unsigned jobs = 1;
    // estimate
    std::size_t samples = 1000;
    // dims
    std::optional<std::size_t> dims_m;
};

int cmd_gen(const Args& a, std::ostream& out) {
    const auto cls = parse_operator_class(a.cls);
    const auto op = random_operator(a.dim, cls, a.seed);
    const fs::path p = resolve(a.out, "operator_" + a.cls + "_m" + std::to_string(a.dim) + "_s" +
                                          std::to_string(a.seed) + ".json");
    emit(p, json::dump(json::to_json(op)), out);
    if (p != "-") out << p.string() << '\n';
    return kOk;
}

int cmd_represent(const Args& a, std::ostream& out) {
    const auto method = parse_construction(a.method);
    const auto op = json::operator_from_json(read_json(a.in));
    const std::string base = stem(a.in) + "." + a.method;
    const fs::path p = resolve(a.out, base + ".json");
    if (method == Construction::Thm5) {
        const auto series = ricci_flat_series(op, a.order);
        const fs::path side = p == "-" ? output_dir() / (base + ".series.json")
                                       : fs::path(p).replace_extension(".series.json");
        emit(p, json::dump(json::to_json(series.truncation())), out);
        emit(side, json::dump(json::to_json(series)), out);
        if (p != "-") out << p.string() << '\n';
        out << side.string() << '\n';
    } else {
        emit(p, json::dump(json::to_json(construct(method, op, a.order))), out);
        if (p != "-") out << p.string() << '\n';
    }
    return kOk;
}

int cmd_verify(const Args& a, std::ostream& out) {
    const VerifyOptions opt{a.checks, a.max_degree};
    VerificationReport r;
    if (fs::is_directory(a.in)) {
        r = verify_directory(a.in, opt, a.jobs);
    } else {
        r = verify_file(a.in, opt);
    }
    if (!a.out.empty()) emit(a.out, json::dump(json::to_json(r)), out);
    out << r.to_text();
    return r.all_pass() ? kOk : kCheckFailed;
}

int cmd_decompose(const Args& a, std::ostream& out) {
    const auto op = json::operator_from_json(read_json(a.in));
    const auto split = decompose_equiaffine(op);
    VerificationReport r;
    r.metadata().dim = op.dim();
    const auto recon = first_difference(split.ricci_part + split.weyl_part, op);
    r.record("reconstitution", !recon, recon.value_or(Witness{}));
    const auto rw = first_nonzero(ricci(split.weyl_part));
    r.record("weyl_part_ricci_flat", !rw, rw.value_or(Witness{}));
    const auto pr = first_nonzero(weyl_projective(split.ricci_part));
    r.record("ricci_part_projectively_flat", !pr, pr.value_or(Witness{}));

    const std::string prefix = a.out.empty() ? (output_dir() / stem(a.in)).string() : a.out;
    emit(prefix + ".ricci_part.json", json::dump(json::to_json(split.ricci_part)), out);
    emit(prefix + ".weyl_part.json", json::dump(json::to_json(split.weyl_part)), out);
    emit(prefix + ".report.json", json::dump(json::to_json(r)), out);
    out << r.to_text();
    return r.all_pass() ? kOk : kCheckFailed;
}

int cmd_estimate(const Args& a, std::ostream& out) {
    const auto series = json::series_from_json(read_json(a.in));
    const auto rep = convergence_report(series, a.samples, a.seed);
    const fs::path p = resolve(a.out, stem(a.in) + ".estimate.json");
    emit(p, json::dump(json::to_json(rep)), out);
    out << "C1: " << rep.params.c1 << "\nC: " << rep.params.c << "\nepsilon: " << rep.params.epsilon << '\n';
    for (const auto& l : rep.per_layer) {
        out << "layer " << l.nu << ": max_ratio " << l.max_ratio << ", violations " << l.violations << '\n';
    }
    out << "violations: " << rep.total_violations() << '\n';
    return rep.pass() ? kOk : kCheckFailed;
}

int cmd_demo(const Args& a, std::ostream& out) {
    const auto r = remark6_demo(a.demo_order);
    if (!a.out.empty()) emit(a.out, json::dump(json::to_json(r)), out);
    out << r.to_text();
    return r.all_pass() ? kOk : kCheckFailed;
}

// Prints the four conditions; exit 0 as long as they agree.
int cmd_lemma2(const Args& a, std::ostream& out) {
    const auto c = json::connection_from_json(read_json(a.in));
    const auto r = lemma2_report(c);
    if (!a.out.empty()) emit(a.out, json::dump(json::to_json(r)), out);
    out << r.to_text();
    const Check* agree = r.find("conditions_agree");
    return agree != nullptr && agree->pass ? kOk : kCheckFailed;
}

int cmd_dims(const Args& a, std::ostream& out) {
    std::vector<std::size_t> ms;
    if (a.dims_m) {
        ms.push_back(*a.dims_m);
    } else {
        for (std::size_t m = 2; m <= 5; ++m) ms.push_back(m);
    }
    out << "m generic equiaffine proj-flat ricci-flat\n";
    for (auto m : ms) {
        out << m;
        for (auto c : {OperatorClass::Generic, OperatorClass::Equiaffine, OperatorClass::ProjectivelyFlat,
                       OperatorClass::RicciFlat}) {
            out << ' ' << space_dimension(m, c);
        }
        out << '\n';
    }
    return kOk;
}

int guarded(const std::function<int()>& f, std::ostream& err) {
    try {
        return f();
    } catch (const ClassViolation& e) {
        err << "class violation: " << e.what() << '\n';
        return kClassViolation;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kIoError;
    } catch (const fs::filesystem_error& e) {
        err << "i/o error: " << e.what() << '\n';
        return kIoError;
    } catch (const ParseError& e) {
        err << "malformed input: " << e.what() << '\n';
        return kBadArguments;
    } catch (const nlohmann::json::exception& e) {
        err << "malformed input: " << e.what() << '\n';
        return kBadArguments;
    } catch (const InvalidArgument& e) {
        err << "invalid argument: " << e.what() << '\n';
        return kBadArguments;
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Torsion-free connections with prescribed curvature at the origin"};
    app.name("affrep");
    app.require_subcommand(1);

    Args a;
    std::function<int()> action;

    auto* gen = app.add_subcommand("gen", "Write a seeded random curvature operator");
    gen->add_option("--dim", a.dim, "Dimension m")->required();
    gen->add_option("--class", a.cls, "generic, equiaffine, proj-flat or ricci-flat")->required();
    gen->add_option("--seed", a.seed, "Random seed");
    gen->add_option("-o,--out", a.out, "Output file ('-' for stdout)");
    gen->callback([&] { action = [&] { return cmd_gen(a, out); }; });

    auto* rep = app.add_subcommand("represent", "Build a connection realizing an operator at 0");
    rep->add_option("--method", a.method, "thm1, thm3, thm4 or thm5")->required();
    rep->add_option("-N,--order", a.order, "Number of series layers (thm5)");
    rep->add_option("-i,--in", a.in, "Operator file")->required();
    rep->add_option("-o,--out", a.out, "Connection file; thm5 also writes <out>.series.json");
    rep->callback([&] { action = [&] { return cmd_represent(a, out); }; });

    auto* ver = app.add_subcommand("verify", "Check identities of a connection or operator (file or directory)");
    ver->add_option("-i,--in", a.in, "Input file or directory of .json files")->required();
    ver->add_option("--checks", a.checks,
                    "Comma list. Connections: matches:FILE, lemma2, ricci-order:N, ricci-flat, closed-omega, "
                    "proj-flat. Operators: symmetries, class:NAME")
        ->delimiter(',');
    ver->add_option("--max-degree", a.max_degree, "Refuse connections above this degree");
    ver->add_option("-j,--jobs", a.jobs, "Worker threads for directory input");
    ver->add_option("-o,--out", a.out, "Report file");
    ver->callback([&] { action = [&] { return cmd_verify(a, out); }; });

    auto* dec = app.add_subcommand("decompose", "Split an equiaffine operator into Ricci and Weyl parts");
    dec->add_option("-i,--in", a.in, "Operator file")->required();
    dec->add_option("-o,--out-prefix", a.out, "Prefix for the .ricci_part/.weyl_part/.report files");
    dec->callback([&] { action = [&] { return cmd_decompose(a, out); }; });

    auto* est = app.add_subcommand("estimate", "Sample the layer bounds of a series file");
    est->add_option("-i,--in", a.in, "Series file")->required();
    est->add_option("--samples", a.samples, "Sample points");
    est->add_option("--seed", a.seed, "Random seed");
    est->add_option("-o,--out", a.out, "Report file");
    est->callback([&] { action = [&] { return cmd_estimate(a, out); }; });

    auto* demo = app.add_subcommand("demo-remark6", "Naive construction versus the series on a Ricci-flat operator");
    demo->add_option("-N,--order", a.demo_order, "Largest truncation order");
    demo->add_option("-o,--out", a.out, "Report file");
    demo->callback([&] { action = [&] { return cmd_demo(a, out); }; });

    auto* lem = app.add_subcommand("lemma2", "Evaluate the four equiaffine conditions of a connection");
    lem->add_option("-i,--in", a.in, "Connection file")->required();
    lem->add_option("-o,--out", a.out, "Report file");
    lem->callback([&] { action = [&] { return cmd_lemma2(a, out); }; });

    auto* dims = app.add_subcommand("dims", "Dimensions of the operator spaces");
    dims->add_option("--dim", a.dims_m, "Only this m");
    dims->callback([&] { action = [&] { return cmd_dims(a, out); }; });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kBadArguments;
    }
    return guarded(action, err);
}

}  // namespace affrep::cli
