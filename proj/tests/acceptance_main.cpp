// Acceptance suite: one line per criterion, PASS/FAIL, nonzero exit on
// any failure. Criteria run from the checked-in config files wherever
// possible; a few structural checks (value gaps, byte determinism) are
// evaluated directly here.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "tubelab/density.hpp"
#include "tubelab/report.hpp"
#include "tubelab/tube.hpp"

namespace fs = std::filesystem;
using tubelab::report::Json;
using tubelab::report::ReportRow;
using tubelab::report::RunResult;

namespace {

struct Args {
    std::string tubelab_bin;
    std::string configs_dir;
    std::string scratch_dir;
};

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail = "") {
    std::printf("CRITERION %02d [%s] %s%s%s\n", criterion, pass ? "PASS" : "FAIL", what.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

Json load(const Args& args, const std::string& name) {
    std::ifstream in(args.configs_dir + "/" + name);
    if (!in) throw std::runtime_error("missing config " + name);
    Json doc;
    in >> doc;
    return doc;
}

bool rows_clean(const RunResult& res, std::string& why) {
    if (res.exit_code != 0) {
        why = "exit code " + std::to_string(res.exit_code);
        return false;
    }
    for (const ReportRow& row : res.rows) {
        if (row.pass == "fail") {
            std::ostringstream os;
            os << row.space << "/" << row.quantity << " value " << row.value;
            if (row.reference) os << " vs " << *row.reference;
            why = os.str();
            return false;
        }
    }
    return true;
}

const ReportRow* find_row(const RunResult& res, const std::string& space_prefix,
                          const std::string& quantity, double r = -1.0) {
    for (const ReportRow& row : res.rows) {
        if (row.quantity != quantity) continue;
        if (row.space.rfind(space_prefix, 0) != 0) continue;
        if (r > 0 && (!std::isfinite(row.r) || std::fabs(row.r - r) > 1e-12)) continue;
        return &row;
    }
    return nullptr;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void criterion01(const Args& args) {
    RunResult res = tubelab::report::run_document(load(args, "criterion01_tube_harmonic.json"));
    std::string why;
    bool ok = rows_clean(res, why);
    // pin the H3 closed form: v(0.5) = pi sinh^2(0.5)
    const ReportRow* h3 = find_row(res, "h3", "tube_volume", 0.5);
    ok = ok && h3 && h3->reference &&
         std::fabs(*h3->reference - tubelab::geo::kPi * std::sinh(0.5) * std::sinh(0.5)) < 1e-12;
    int checked = 0;
    for (const ReportRow& row : res.rows)
        if (row.quantity == "tube_volume") ++checked;
    ok = ok && checked == 15;  // 5 spaces x 3 radii
    report(1, ok,
           "harmonic tube formula: direct volumes match omega_(n-1) r^(n-1) theta(r) l on R3, "
           "S3, H3, DR(2,1), DR(4,3) at r in {0.2, 0.5, 0.8} (rel. 1e-4)",
           why);
}

void criterion02(const Args& args) {
    // Direct computation with error estimates; the config records the
    // same two runs for the CLI.
    using namespace tubelab;
    auto spec = spaces::SpaceSpec::product_space(spaces::SpaceSpec::sphere_space(2, 1.0),
                                                 spaces::SpaceSpec::euclidean_space(1));
    auto m = spaces::make_space(spec);
    tube::FramedCurve axial = tube::FramedCurve::geodesic(m, {0, 0, 0}, {0, 0, 1}, 1.0);
    tube::FramedCurve spherical = tube::FramedCurve::geodesic(m, {0, 0, 0}, {1, 0, 0}, 1.0);
    rules::Estimated va = tube::tube_volume_estimated(m, axial, 0.5);
    rules::Estimated vs = tube::tube_volume_estimated(m, spherical, 0.5);
    const double gap = std::fabs(va.value - vs.value);
    const bool ok = gap > 10.0 * (va.error + vs.error);
    std::ostringstream os;
    os << "V_axial=" << va.value << " V_spherical=" << vs.value << " gap=" << gap
       << " err_sum=" << va.error + vs.error;
    RunResult res = tubelab::report::run_document(
        load(args, "criterion02_tube_property_failure.json"));
    report(2, ok && res.exit_code == 0,
           "tube property fails on S2xR: axial vs spherical geodesic tubes at r=0.5 differ by "
           "more than 10x the numerical error estimate",
           os.str());
}

void criterion03(const Args& args) {
    RunResult res = tubelab::report::run_document(load(args, "criterion03_involution.json"));
    std::string why;
    bool ok = rows_clean(res, why);
    int rows = 0;
    for (const ReportRow& row : res.rows)
        if (row.quantity == "involution_defect") ++rows;
    ok = ok && rows == 2;
    report(3, ok,
           "universal involution symmetry: max over 100 random v per space of "
           "|theta(iota v) - theta(v)|/theta <= 1e-7 on the ellipsoid and S2xR",
           why);
}

void criterion04(const Args& args) {
    RunResult res = tubelab::report::run_document(load(args, "criterion04_mean_curvature.json"));
    std::string why;
    bool ok = rows_clean(res, why);
    int rows = 0;
    for (const ReportRow& row : res.rows)
        if (row.quantity == "mean_curvature") ++rows;
    ok = ok && rows == 32;  // 8 spaces x 4 radii
    report(4, ok,
           "mean-curvature identity: -tr(A'A^-1) matches -(n-1)/r - d_r(theta)/theta within "
           "1e-5 on all built-ins, r in [0.1, 0.8]",
           why);
}

void criterion05(const Args& args) {
    RunResult res = tubelab::report::run_document(load(args, "criterion05_cosine_transform.json"));
    std::string why;
    bool ok = rows_clean(res, why);
    report(5, ok,
           "cosine transform: C(1) = 2 omega_(n-1) for n in {3,4,5}, three odd functions "
           "annihilated, hemisphere moment = C/2 on even functions (1e-10)",
           why);
}

void criterion06(const Args& args) {
    RunResult res = tubelab::report::run_document(load(args, "criterion06_stiefel_fubini.json"));
    std::string why;
    bool ok = rows_clean(res, why);
    const ReportRow* c = find_row(res, "r3", "lhs[const:n=3]");
    ok = ok && c && c->reference &&
         std::fabs(*c->reference - 8.0 * tubelab::geo::kPi * tubelab::geo::kPi) < 1e-10;
    report(6, ok,
           "Stiefel-Fubini: f=1 gives n(n-1) omega_n omega_(n-1) = 8 pi^2 on both sides "
           "(1e-10); two non-symmetric f agree to 1e-8 |lhs|",
           why);
}

void criterion07(const Args& args) {
    RunResult res = tubelab::report::run_document(load(args, "criterion07_halfball_datri.json"));
    std::string why;
    bool ok = rows_clean(res, why);
    // the ellipsoid first-integral defect must be a genuine failure
    // above 1e-3, tagged expected-fail
    bool ellipsoid_fails = false;
    for (const ReportRow& row : res.rows)
        if (row.quantity == "first_integral_defect" && row.space.rfind("ellipsoid", 0) == 0)
            ellipsoid_fails = row.pass == "expected-fail" && row.value > 1e-3;
    ok = ok && ellipsoid_fails;
    report(7, ok,
           "half-ball partition exact at rule level; D'Atri defects <= 1e-6 on H3 and S2xR; "
           "ellipsoid first-integral defect > 1e-3 at s=0.8",
           why);
}

void criterion08(const Args& args) {
    RunResult res = tubelab::report::run_document(load(args, "criterion08_series_structure.json"));
    std::string why;
    bool ok = rows_clean(res, why);
    // harmonic built-ins reach order 6; negative controls break at 2
    int harmonic_pass = 0;
    bool s2xr_breaks = false, ellipsoid_breaks = false;
    for (const ReportRow& row : res.rows) {
        if (row.quantity != "harmonic_up_to") continue;
        if (row.space.rfind("s2xr", 0) == 0)
            s2xr_breaks = row.pass == "expected-fail" && row.value < 2;
        else if (row.space.rfind("ellipsoid", 0) == 0)
            ellipsoid_breaks = row.pass == "expected-fail" && row.value < 2;
        else if (row.value == 6)
            ++harmonic_pass;
    }
    ok = ok && harmonic_pass == 5 && s2xr_breaks && ellipsoid_breaks;
    report(8, ok,
           "series structure: a0=1 (1e-8), a1=0, a2=-Ric(u,u)/6 (1e-4), S3 a4=2/45 (1e-4); "
           "harmonic built-ins pass order 6, S2xR and ellipsoid fail at order 2",
           why);
}

void criterion09(const Args& args) {
    RunResult res = tubelab::report::run_document(load(args, "criterion09_closed_forms.json"));
    std::string why;
    bool ok = rows_clean(res, why);
    const ReportRow* area = find_row(res, "h3", "area", 0.5);
    const ReportRow* h = find_row(res, "h3", "total_mean_curvature", 0.5);
    const ReportRow* c3 = find_row(res, "h3", "total_scalar_curvature", 0.5);
    const ReportRow* c5 = find_row(res, "r5", "total_scalar_curvature", 0.3);
    ok = ok && area && area->reference &&
         std::fabs(*area->reference - tubelab::geo::kPi * std::sinh(1.0)) < 1e-12;
    ok = ok && h && h->reference &&
         std::fabs(*h->reference + tubelab::geo::kPi * std::cosh(1.0)) < 1e-12;
    ok = ok && c3 && c3->reference && std::fabs(*c3->reference) < 1e-12;
    ok = ok && c5 && c5->reference &&
         std::fabs(*c5->reference - 12.0 * std::pow(tubelab::geo::kPi, 2) * 0.3) < 1e-10;
    report(9, ok,
           "closed forms: H3 tube at r=0.5 has A = pi sinh(1), H = -pi cosh(1), C = 0 "
           "(1e-3); R5 tube has C = 12 pi^2 r l (1e-4, Gheysens-Vanhecke leading term)",
           why);
}

void criterion10(const Args& args) {
    RunResult res = tubelab::report::run_document(load(args, "criterion10_steiner.json"));
    std::string why;
    bool ok = rows_clean(res, why);
    int ratio_rows = 0;
    for (const ReportRow& row : res.rows)
        if (row.quantity == "residual_decay_ratio") ++ratio_rows;
    ok = ok && ratio_rows == 2;
    report(10, ok,
           "Steiner expansion: offset derivatives of V match the area / -int mu / "
           "int(Ric(N)+tau^P-tau) coefficients within 1e-3 on H3 and S2xR; residual decays at "
           "fourth order (ratio in [12,20])",
           why);
}

void criterion11(const Args& args) {
    fs::create_directories(args.scratch_dir);
    bool ok = true;
    std::ostringstream detail;
    const std::vector<std::pair<std::string, std::string>> cases = {
        {"criterion05_cosine_transform.json", "csv"},
        {"criterion07_halfball_datri.json", "json"},
    };
    for (const auto& [config, fmt] : cases) {
        const std::string out1 = args.scratch_dir + "/det1_" + fmt + ".out";
        const std::string out2 = args.scratch_dir + "/det2_" + fmt + ".out";
        for (const std::string& out : {out1, out2}) {
            std::ostringstream cmd;
            cmd << args.tubelab_bin << " run " << args.configs_dir << "/" << config
                << " --format " << fmt << " --out " << out;
            const int rc = std::system(cmd.str().c_str());
            if (rc == -1) ok = false;
        }
        const std::string a = read_file(out1), b = read_file(out2);
        if (a.empty() || a != b) {
            ok = false;
            detail << config << " bytes differ; ";
        }
    }
    report(11, ok, "determinism: re-running checked-in configs reproduces byte-identical "
                   "CSV and JSON output",
           detail.str());
}

}  // namespace

int main(int argc, char** argv) {
    Args args;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string key = argv[i];
        if (key == "--tubelab") args.tubelab_bin = argv[i + 1];
        else if (key == "--configs") args.configs_dir = argv[i + 1];
        else if (key == "--scratch") args.scratch_dir = argv[i + 1];
    }
    if (args.configs_dir.empty()) {
        std::cerr << "usage: acceptance_suite --tubelab BIN --configs DIR --scratch DIR\n";
        return 2;
    }
    if (args.scratch_dir.empty()) args.scratch_dir = "acceptance_scratch";

    try {
        criterion01(args);
        criterion02(args);
        criterion03(args);
        criterion04(args);
        criterion05(args);
        criterion06(args);
        criterion07(args);
        criterion08(args);
        criterion09(args);
        criterion10(args);
        if (!args.tubelab_bin.empty())
            criterion11(args);
        else
            report(11, false, "determinism", "no --tubelab binary given");
    } catch (const std::exception& e) {
        std::printf("ACCEPTANCE ABORTED: %s\n", e.what());
        return 1;
    }
    std::printf("%s: %d/11 criteria passed\n", g_failures == 0 ? "SUCCESS" : "FAILURE",
                11 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
