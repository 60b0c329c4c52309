#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sublevel/json_io.hpp"
#include "sublevel/lattice.hpp"
#include "sublevel/variational.hpp"
#include "sublevel/volumes.hpp"

using nlohmann::json;
using namespace sublevel;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

struct Options {
    std::string poly_file, phi_file, points_file, lattice_file, out_file;
    std::string format = "json";
    std::uint64_t seed = 0;
    std::uint64_t outer = 2048;
    std::uint64_t inner = 4096;
    int workers = 1;
    double alpha = 1.0;
    double t = 1.0;
    int j = 1;
};

struct Run {
    Options opt;
    json manifest;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    EstimatorConfig estimator() const {
        EstimatorConfig cfg;
        cfg.seed = opt.seed;
        cfg.outer_samples = opt.outer;
        cfg.inner_samples = opt.inner;
        cfg.workers = opt.workers;
        cfg.alpha = opt.alpha;
        return cfg;
    }

    LatticeConfig lattice_config() const {
        LatticeConfig cfg;
        if (const char* env = std::getenv("SUBLEVEL_MAX_ENUM")) {
            char* end = nullptr;
            const unsigned long long v = std::strtoull(env, &end, 10);
            if (end && *end == '\0' && v > 0) cfg.max_enumeration = v;
        }
        return cfg;
    }

    void start(const std::string& command) {
        const EstimatorConfig est = estimator();
        manifest = json{{"command", command},
                        {"version", kVersion},
                        {"config",
                         {{"seed", est.seed},
                          {"outer_samples", est.outer_samples},
                          {"inner_samples", est.inner_samples},
                          {"workers", est.workers},
                          {"alpha", opt.alpha},
                          {"t", opt.t},
                          {"j", opt.j},
                          {"solver",
                           {{"tol_foc", est.solver.tol_foc},
                            {"max_iters", est.solver.max_iters},
                            {"quadratic_shortcut", est.solver.use_quadratic_shortcut}}},
                          {"max_enumeration", lattice_config().max_enumeration}}},
                        {"inputs", json::object()}};
    }

    std::string load_input(const std::string& label, const std::string& path) {
        const std::string bytes = read_file(path);
        manifest["inputs"][label] = json{{"path", path}, {"fnv1a64", fnv1a64(bytes)}};
        return bytes;
    }

    HomogeneousPolynomial load_poly(const std::string& label, const std::string& path) {
        return parse_polynomial(load_input(label, path));
    }

    void emit(const json& result, const std::string& csv) const {
        std::string payload;
        if (opt.format == "csv") {
            if (csv.empty()) throw precondition_error("csv output is not defined for this command");
            payload = csv;
        } else {
            payload = json{{"manifest", manifest}, {"result", result}}.dump(2);
            payload.push_back('\n');
        }
        if (opt.out_file.empty()) {
            std::cout << payload;
        } else {
            std::ofstream out(opt.out_file, std::ios::binary);
            if (!out) throw parse_error("cannot open output file: " + opt.out_file);
            out << payload;
        }
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - started)
                            .count();
        std::cerr << manifest["command"].get<std::string>() << ": done in " << ms << " ms\n";
    }
};

void add_common(CLI::App* cmd, Options& opt) {
    cmd->add_option("--seed", opt.seed, "random seed");
    cmd->add_option("--outer", opt.outer, "Grassmannian sample count");
    cmd->add_option("--inner", opt.inner, "sphere sample count per subspace");
    cmd->add_option("--workers", opt.workers, "worker threads");
    cmd->add_option("--out", opt.out_file, "write output to this file");
    cmd->add_option("--format", opt.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
}

HomogeneousPolynomial certified_member(Run& run, const std::string& path) {
    HomogeneousPolynomial f = run.load_poly("poly", path);
    certify_positive(f);
    if (!certify_convex(f))
        throw not_positive("polynomial failed the convexity certificate");
    return f;
}

std::string estimate_csv(const Estimate& e) {
    std::ostringstream os;
    os.precision(17);
    os << "value,std_error,outer_samples,inner_samples\n"
       << e.value << ',' << e.std_error << ',' << e.outer_samples << ',' << e.inner_samples
       << '\n';
    return os.str();
}

std::vector<Eigen::VectorXd> load_points(Run& run, const std::string& path) {
    const std::string bytes = run.load_input("points", path);
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv")
        return points_from_csv(bytes);
    return points_from_json(json::parse(bytes));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"intrinsic and dual volumes of polynomial sublevel sets"};
    app.require_subcommand(1);

    Run run;

    std::string variant = "intrinsic";
    std::string norm_name = "l2";
    std::string alphas_arg;
    double block_a = 1.0, block_b = 1.0;
    int block_m = 1, dim_n = 2, degree_d = 2;
    bool wills = false;

    auto* volume = app.add_subcommand("volume", "intrinsic volume V_j of [f <= alpha]");
    volume->add_option("--poly", run.opt.poly_file, "polynomial JSON file")->required();
    volume->add_option("--j", run.opt.j, "volume index")->required();
    volume->add_option("--alpha", run.opt.alpha, "level");
    add_common(volume, run.opt);

    auto* dualv = app.add_subcommand("dual-volume", "dual volume of [f <= alpha]");
    dualv->add_option("--poly", run.opt.poly_file, "polynomial JSON file")->required();
    dualv->add_option("--j", run.opt.j, "volume index")->required();
    dualv->add_option("--alpha", run.opt.alpha, "level");
    add_common(dualv, run.opt);

    auto* fullv = app.add_subcommand("full-volume", "n-dimensional volume of [f <= alpha]");
    fullv->add_option("--poly", run.opt.poly_file, "polynomial JSON file")->required();
    fullv->add_option("--alpha", run.opt.alpha, "level");
    add_common(fullv, run.opt);

    auto* gateaux = app.add_subcommand("gateaux", "directional derivative of the functional");
    gateaux->add_option("--poly", run.opt.poly_file, "base polynomial")->required();
    gateaux->add_option("--phi", run.opt.phi_file, "direction polynomial")->required();
    gateaux->add_option("--j", run.opt.j, "volume index")->required();
    gateaux->add_option("--variant", variant, "intrinsic|dual")
        ->check(CLI::IsMember({"intrinsic", "dual"}));
    add_common(gateaux, run.opt);

    auto* lj = app.add_subcommand("lowner-john", "smallest sublevel body containing points");
    lj->add_option("--points", run.opt.points_file, "points file (json or csv)")->required();
    lj->add_option("--j", run.opt.j, "volume index")->required();
    lj->add_option("--d", degree_d, "polynomial degree")->required();
    lj->add_option("--variant", variant, "intrinsic|dual")
        ->check(CLI::IsMember({"intrinsic", "dual"}));
    add_common(lj, run.opt);

    auto* q0 = app.add_subcommand("q0-check", "isotropic optimality among unit-norm bodies");
    q0->add_option("--n", dim_n, "ambient dimension")->required();
    q0->add_option("--d", degree_d, "degree")->required();
    q0->add_option("--j", run.opt.j, "volume index")->required();
    q0->add_option("--norm", norm_name, "l2|sup")->check(CLI::IsMember({"l2", "sup"}));
    add_common(q0, run.opt);

    auto* blockdemo = app.add_subcommand(
        "block-demo", "block-separable model: assemble and estimate, or compare the "
                      "two-block closed form with Monte Carlo");
    std::string blocks_file;
    blockdemo->add_option("--blocks", blocks_file, "block structure JSON file");
    blockdemo->add_option("--a", block_a, "first block weight");
    blockdemo->add_option("--b", block_b, "second block weight");
    blockdemo->add_option("--m", block_m, "first block dimension");
    blockdemo->add_option("--n", dim_n, "ambient dimension");
    blockdemo->add_option("--d", degree_d, "degree");
    blockdemo->add_option("--j", run.opt.j, "volume index")->required();
    blockdemo->add_option("--alpha", run.opt.alpha, "level");
    add_common(blockdemo, run.opt);

    auto* count = app.add_subcommand("count", "exact lattice point count in [f <= alpha]");
    count->add_option("--poly", run.opt.poly_file, "polynomial JSON file")->required();
    count->add_option("--alpha", run.opt.alpha, "level")->required();
    add_common(count, run.opt);

    auto* prim = app.add_subcommand("primitive", "primitive lattice points, two routes");
    prim->add_option("--poly", run.opt.poly_file, "polynomial JSON file")->required();
    prim->add_option("--alpha", run.opt.alpha, "level")->required();
    add_common(prim, run.opt);

    auto* sublat = app.add_subcommand("sublattice", "count on a primitive sublattice");
    sublat->add_option("--poly", run.opt.poly_file, "polynomial JSON file")->required();
    sublat->add_option("--lattice", run.opt.lattice_file, "lattice basis JSON file")->required();
    sublat->add_option("--alpha", run.opt.alpha, "level")->required();
    add_common(sublat, run.opt);

    auto* coset = app.add_subcommand("coset", "count on an integer solution coset of Ax=b");
    coset->add_option("--poly", run.opt.poly_file, "polynomial JSON file")->required();
    coset->add_option("--lattice", run.opt.lattice_file, "constraints JSON file (A, b)")
        ->required();
    coset->add_option("--alpha", run.opt.alpha, "level")->required();
    add_common(coset, run.opt);

    auto* theta = app.add_subcommand("theta", "theta series with certified tail");
    theta->add_option("--poly", run.opt.poly_file, "polynomial JSON file")->required();
    theta->add_option("--t", run.opt.t, "scale parameter")->required();
    theta->add_flag("--wills", wills, "also report the volume main term and max_j V_j");
    add_common(theta, run.opt);

    auto* disc = app.add_subcommand("discrepancy", "count vs volume with component budget");
    disc->add_option("--poly", run.opt.poly_file, "polynomial JSON file")->required();
    disc->add_option("--alpha", run.opt.alpha, "level")->required();
    add_common(disc, run.opt);

    auto* report = app.add_subcommand("report", "trend rows (alpha, count, main, ratio)");
    report->add_option("--poly", run.opt.poly_file, "polynomial JSON file")->required();
    report->add_option("--alphas", alphas_arg, "comma-separated levels")->required();
    add_common(report, run.opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (volume->parsed()) {
            run.start("volume");
            const HomogeneousPolynomial f = certified_member(run, run.opt.poly_file);
            const Estimate est = intrinsic_volume(f, run.opt.j, run.estimator());
            run.emit(estimate_to_json(est), estimate_csv(est));
        } else if (dualv->parsed()) {
            run.start("dual-volume");
            const HomogeneousPolynomial f = certified_member(run, run.opt.poly_file);
            const Estimate est = dual_volume(f, run.opt.j, run.estimator());
            run.emit(estimate_to_json(est), estimate_csv(est));
        } else if (fullv->parsed()) {
            run.start("full-volume");
            HomogeneousPolynomial f = run.load_poly("poly", run.opt.poly_file);
            certify_positive(f);
            const Estimate est = volume_full(f, run.estimator());
            run.emit(estimate_to_json(est), estimate_csv(est));
        } else if (gateaux->parsed()) {
            run.start("gateaux");
            const HomogeneousPolynomial f = certified_member(run, run.opt.poly_file);
            const HomogeneousPolynomial phi =
                parse_polynomial(run.load_input("phi", run.opt.phi_file));
            const Estimate est = (variant == "dual")
                                     ? gateaux_dual(f, phi, run.opt.j, run.estimator())
                                     : gateaux_intrinsic(f, phi, run.opt.j, run.estimator());
            json result = estimate_to_json(est);
            result["variant"] = variant;
            run.emit(result, estimate_csv(est));
        } else if (lj->parsed()) {
            run.start("lowner-john");
            const auto pts = load_points(run, run.opt.points_file);
            VariationalConfig vcfg;
            vcfg.estimator = run.estimator();
            const LJSolution sol =
                solve_P0(pts, run.opt.j, degree_d,
                         variant == "dual" ? VolumeFunctional::dual : VolumeFunctional::intrinsic,
                         vcfg);
            json contacts = json::array();
            for (const auto& p : sol.contact_points) {
                json row = json::array();
                for (int i = 0; i < p.size(); ++i) row.push_back(p[i]);
                contacts.push_back(row);
            }
            json kkt = json::object();
            if (sol.kkt_report.residuals.size() > 0) {
                kkt["max_residual"] = sol.kkt_report.residuals.maxCoeff();
                kkt["mass_gap"] = sol.kkt_report.mass_gap;
                kkt["max_feasibility_gap"] = sol.kkt_report.max_feasibility_gap;
            }
            run.emit(json{{"f_star", polynomial_to_json(sol.f_star)},
                          {"objective", estimate_to_json(sol.objective)},
                          {"contact_points", contacts},
                          {"kkt", kkt},
                          {"converged", sol.converged},
                          {"epochs", sol.epochs_run}},
                     "");
        } else if (q0->parsed()) {
            run.start("q0-check");
            const auto norm =
                (norm_name == "sup")
                    ? std::function<double(const HomogeneousPolynomial&)>(sphere_sup_norm)
                    : std::function<double(const HomogeneousPolynomial&)>(sphere_l2_norm);
            const bool ok = check_Q0_ball(norm, dim_n, degree_d, run.opt.j, run.estimator());
            run.emit(json{{"isotropic_optimal", ok}, {"norm", norm_name}}, "");
        } else if (blockdemo->parsed()) {
            run.start("block-demo");
            if (!blocks_file.empty()) {
                const BlockStructure bs =
                    blocks_from_json(json::parse(run.load_input("blocks", blocks_file)));
                const HomogeneousPolynomial f = assemble(bs);
                const Estimate mc = intrinsic_volume(f, run.opt.j, run.estimator());
                run.emit(json{{"assembled", polynomial_to_json(f)},
                              {"monte_carlo", estimate_to_json(mc)}},
                         "");
            } else {
                const double closed = two_block_norm_volume(block_a, block_b, block_m, dim_n,
                                                            run.opt.j, degree_d, run.opt.alpha);
                const HomogeneousPolynomial f =
                    assemble(two_block_model(block_a, block_b, block_m, dim_n, degree_d));
                const Estimate mc = intrinsic_volume(f, run.opt.j, run.estimator());
                run.emit(json{{"closed_form", closed},
                              {"monte_carlo", estimate_to_json(mc)},
                              {"gap_in_std_errors", mc.std_error > 0
                                                        ? std::abs(mc.value - closed) / mc.std_error
                                                        : 0.0}},
                         "");
            }
        } else if (count->parsed()) {
            run.start("count");
            HomogeneousPolynomial f = run.load_poly("poly", run.opt.poly_file);
            const auto cert = certify_positive(f);
            const long long c = count_points(f, run.opt.alpha, cert, run.lattice_config());
            std::ostringstream csv;
            csv.precision(17);
            csv << "alpha,count\n" << run.opt.alpha << ',' << c << '\n';
            run.emit(json{{"alpha", run.opt.alpha}, {"count", c}, {"exact", true}}, csv.str());
        } else if (prim->parsed()) {
            run.start("primitive");
            HomogeneousPolynomial f = run.load_poly("poly", run.opt.poly_file);
            const auto cert = certify_positive(f);
            const long long direct = primitive_count(f, run.opt.alpha, cert, run.lattice_config());
            const long long mobius = moebius_check(f, run.opt.alpha, cert, run.lattice_config());
            std::ostringstream csv;
            csv.precision(17);
            csv << "alpha,count,moebius\n"
                << run.opt.alpha << ',' << direct << ',' << mobius << '\n';
            run.emit(json{{"alpha", run.opt.alpha},
                          {"count", direct},
                          {"moebius_check", mobius},
                          {"agree", direct == mobius},
                          {"exact", true}},
                     csv.str());
        } else if (sublat->parsed()) {
            run.start("sublattice");
            HomogeneousPolynomial f = run.load_poly("poly", run.opt.poly_file);
            const auto cert = certify_positive(f);
            const IntegerLatticeBasis L =
                lattice_from_json(json::parse(run.load_input("lattice", run.opt.lattice_file)));
            const SublatticeCount r =
                sublattice_count(f, L, run.opt.alpha, cert, run.estimator(), run.lattice_config());
            run.emit(json{{"alpha", run.opt.alpha},
                          {"count", r.count},
                          {"main_term", estimate_to_json(r.main_term)},
                          {"rank", L.rank()},
                          {"covolume", L.covolume()}},
                     "");
        } else if (coset->parsed()) {
            run.start("coset");
            HomogeneousPolynomial f = run.load_poly("poly", run.opt.poly_file);
            const auto cert = certify_positive(f);
            IntMatrix A;
            IntVector b;
            constraints_from_json(json::parse(run.load_input("lattice", run.opt.lattice_file)), A,
                                  b);
            const CosetCount r =
                coset_count(f, A, b, run.opt.alpha, cert, run.estimator(), run.lattice_config());
            json result{{"alpha", run.opt.alpha},
                        {"solvable", r.solvable},
                        {"count", r.count},
                        {"kernel_rank", r.kernel_rank}};
            if (r.solvable) {
                json x0 = json::array();
                for (int i = 0; i < r.particular.size(); ++i) x0.push_back(r.particular[i]);
                result["particular_solution"] = x0;
            }
            if (r.has_main_term) result["main_term"] = estimate_to_json(r.main_term);
            run.emit(result, "");
        } else if (theta->parsed()) {
            run.start("theta");
            HomogeneousPolynomial f = run.load_poly("poly", run.opt.poly_file);
            const auto cert = certify_positive(f);
            const ThetaResult r = theta_sum(f, run.opt.t, cert, run.lattice_config());
            json result{{"t", run.opt.t},
                        {"value", r.value},
                        {"tail_bound", r.tail_bound},
                        {"box_radius", r.radius}};
            if (wills) {
                const int n = f.dimension();
                const int d = f.degree();
                const Estimate vn = volume_full(f, run.estimator());
                result["main_term"] = std::tgamma(1.0 + double(n) / d) * vn.value *
                                      std::pow(run.opt.t, -double(n) / d);
                double wmax = 1.0; // V_0
                for (int jj = 1; jj < n; ++jj)
                    wmax = std::max(wmax, intrinsic_volume(f, jj, run.estimator()).value);
                result["wills_max"] = wmax;
            }
            std::ostringstream csv;
            csv.precision(17);
            csv << "t,value,tail_bound,box_radius\n"
                << run.opt.t << ',' << r.value << ',' << r.tail_bound << ',' << r.radius << '\n';
            run.emit(result, csv.str());
        } else if (disc->parsed()) {
            run.start("discrepancy");
            const HomogeneousPolynomial f = certified_member(run, run.opt.poly_file);
            const auto cert = certify_positive(f);
            EstimatorConfig est = run.estimator();
            est.alpha = 1.0; // discrepancy_report applies alpha itself
            const CountReport rep =
                discrepancy_report(f, run.opt.alpha, est, cert, run.lattice_config());
            std::ostringstream csv;
            csv.precision(17);
            csv << "alpha,count,main,ratio\n"
                << rep.alpha << ',' << rep.count << ',' << rep.main_term.value << ',' << rep.ratio
                << '\n';
            run.emit(count_report_to_json(rep), csv.str());
        } else if (report->parsed()) {
            run.start("report");
            const HomogeneousPolynomial f = certified_member(run, run.opt.poly_file);
            const auto cert = certify_positive(f);
            std::vector<double> alphas;
            std::istringstream as(alphas_arg);
            std::string cell;
            while (std::getline(as, cell, ',')) alphas.push_back(std::stod(cell));
            if (alphas.empty()) throw precondition_error("report: no alphas given");

            json rows = json::array();
            std::ostringstream csv;
            csv.precision(17);
            csv << "alpha,count,main,ratio\n";
            for (double a : alphas) {
                EstimatorConfig est = run.estimator();
                est.alpha = 1.0;
                const CountReport rep = discrepancy_report(f, a, est, cert, run.lattice_config());
                rows.push_back(json{{"alpha", a},
                                    {"count", rep.count},
                                    {"main", rep.main_term.value},
                                    {"ratio", rep.ratio}});
                csv << a << ',' << rep.count << ',' << rep.main_term.value << ',' << rep.ratio
                    << '\n';
            }
            run.emit(json{{"rows", rows}}, csv.str());
        }
    } catch (const precondition_error& e) {
        std::cerr << "precondition error: " << e.what() << "\n";
        return 2;
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
