// revcont — optimal selling mechanisms for finite-support valuations, exact
// Wasserstein distances, discount transforms, and numeric certification of
// the square-root revenue-continuity bounds at desk scale.
//
// Exit codes: 0 success, 1 validation/input error, 2 a checked bound failed
// to hold, 3 the LP solver finished with a numeric warning.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "revcont/io.hpp"
#include "revcont/mechanism.hpp"
#include "revcont/optimal_revenue.hpp"
#include "revcont/theorem_harness.hpp"
#include "revcont/transport.hpp"
#include "revcont/valuation.hpp"

namespace {

using namespace revcont;

double report_tolerance() {
    if (const char* env = std::getenv("REVCONT_TOL")) {
        char* end = nullptr;
        const double t = std::strtod(env, &end);
        if (end != env) return t;
    }
    return kReportTol;
}

int run_rev(const std::string& dist_path, const std::string& space_name,
            const std::string& klass, const std::string& out_path) {
    const auto d = load_distribution(dist_path);
    const AllocationSpace space{space_kind_from_string(space_name), d.k};
    json out;
    int code = 0;

    if (klass == "lp") {
        const auto res = optimal_rev_lp(d, space);
        if (res.status == SolveStatus::infeasible_input) {
            std::cerr << "error: LP reported infeasible input\n";
            return 1;
        }
        if (res.status == SolveStatus::numeric_warning) code = 3;
        out = result_to_json(res);
        std::cout << format_sig(res.value) << "\n";
    } else if (klass == "myerson") {
        const auto [price, value] = myerson_one_good(d);
        out = {{"price", price}, {"value", value}};
        std::cout << format_sig(value) << "\n";
    } else if (klass == "srev") {
        out = {{"prices", srev_prices(d)}, {"value", srev(d)}};
        std::cout << format_sig(out["value"].get<double>()) << "\n";
    } else if (klass == "brev") {
        out = {{"price", brev_price(d)}, {"value", brev(d)}};
        std::cout << format_sig(out["value"].get<double>()) << "\n";
    } else if (klass == "drev") {
        const double value = drev_bruteforce(d);
        out = {{"value", value}};
        std::cout << format_sig(value) << "\n";
    } else {
        std::cerr << "error: unknown mechanism class '" << klass << "'\n";
        return 1;
    }

    if (!out_path.empty()) {
        std::ofstream f(out_path);
        if (!f) throw std::runtime_error("cannot write " + out_path);
        f << out.dump(2) << "\n";
    }
    return code;
}

int run_wasserstein(const std::string& x_path, const std::string& y_path,
                    const std::string& cost_name, const std::string& plan_path) {
    const auto dx = load_distribution(x_path);
    const auto dy = load_distribution(y_path);
    const auto res = wasserstein(dx, dy, ground_cost_from_string(cost_name));
    std::cout << format_sig(res.value) << "\n";
    if (!plan_path.empty()) {
        json out;
        out["cost"] = res.plan.cost;
        out["ground_cost"] = res.plan.ground_cost.name();
        out["matrix"] = res.plan.matrix;
        std::ofstream f(plan_path);
        if (!f) throw std::runtime_error("cannot write " + plan_path);
        f << out.dump(2) << "\n";
    }
    return 0;
}

int run_discount(const std::string& menu_path, double eta, const std::string& out_path) {
    const auto menu = load_menu(menu_path);
    const auto discounted = discount(menu, eta);
    if (out_path.empty())
        std::cout << menu_to_json(discounted).dump(2) << "\n";
    else
        save_menu(discounted, out_path);
    return 0;
}

std::string pair_digest(long i, const DiscreteValuation& dx, const DiscreteValuation& dy) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "i=%ld;k=%d;nx=%zu;ny=%zu", i, dx.k, dx.size(), dy.size());
    return buf;
}

int run_verify(const std::string& suite, long count, std::uint64_t seed,
               const std::string& out_path) {
    const double tol = report_tolerance();
    Rng rng(seed);
    std::vector<BoundReport> reports;

    for (long i = 0; i < count; ++i) {
        if (suite == "sqrt") {
            const int k = rng.uniform_int(1, 3);
            const auto dx = random_valuation_k(rng, k);
            const auto dy = random_valuation_k(rng, k);
            reports.push_back(
                check_sqrt_bound(dx, dy, SpaceKind::additive, tol, pair_digest(i, dx, dy)));
        } else if (suite == "lambda") {
            const int k = rng.uniform_int(1, 3);
            const auto dx = random_valuation_k(rng, k);
            const auto dy = random_valuation_k(rng, k);
            const double lambda = (i % 3 == 0) ? 1.1 : (i % 3 == 1) ? 2.0 : 10.0;
            reports.push_back(check_lambda_bound(dx, dy, lambda, tol, pair_digest(i, dx, dy)));
        } else if (suite == "corollary") {
            const int k = rng.uniform_int(1, 3);
            const auto dx = random_valuation_k(rng, k);
            const auto dy = random_valuation_k(rng, k);
            auto [a, b] = check_corollary_bounds(dx, dy, tol, pair_digest(i, dx, dy));
            reports.push_back(std::move(a));
            reports.push_back(std::move(b));
        } else if (suite == "theorem-c") {
            CorpusConfig cfg;
            cfg.min_expected_l1 = 0.1;
            const auto dx = random_valuation(rng, cfg);
            const double eps = 0.2;
            const double m = expected_l1(dx);
            const auto [delta, eta] = theorem_c_params(eps, m);
            (void)eta;
            const auto dy = perturb(dx, delta, PerturbMode::seeded_noise, seed + 7919 * i);
            const auto mu = optimal_rev_lp(dx, {SpaceKind::additive, dx.k}).menu;
            auto reps = check_theorem_c(dx, dy, mu, eps, m, tol, pair_digest(i, dx, dy));
            reports.push_back(std::move(reps.eps_bound));
            reports.push_back(std::move(reps.eta_bound));
            reports.push_back(std::move(reps.two_eps_bound));
        } else if (suite == "remark-b") {
            CorpusConfig cfg;
            cfg.min_expected_l1 = 0.1;
            const auto dx = random_valuation(rng, cfg);
            const double eps = (i % 2 == 0) ? 0.2 : 0.5;
            const double delta = eps * eps / (1.0 - eps);
            const auto dy = perturb(dx, delta, PerturbMode::seeded_noise, seed + 104729 * i);
            const Menu mu = (i % 2 == 0)
                                ? optimal_rev_lp(dx, {SpaceKind::additive, dx.k}).menu
                                : random_menu(rng, {SpaceKind::additive, dx.k});
            reports.push_back(check_multiplicative(dx, dy, mu, eps, tol, pair_digest(i, dx, dy)));
        } else if (suite == "remark-e") {
            CorpusConfig cfg;
            cfg.min_expected_l1 = 0.1;
            const auto dx = random_valuation(rng, cfg);
            const auto dy = perturb(dx, rng.uniform(0.0, 0.2), PerturbMode::seeded_noise,
                                    seed + 7907 * i);
            const auto mu = optimal_rev_lp(dx, {SpaceKind::additive, dx.k}).menu;
            reports.push_back(check_remark_e(dx, dy, mu, tol, pair_digest(i, dx, dy)));
        } else if (suite == "rescale") {
            const auto d = random_valuation(rng);
            const double lambda = (i % 3 == 0) ? 0.5 : (i % 3 == 1) ? 2.0 : 10.0;
            reports.push_back(check_rescale_identity(d, lambda, pair_digest(i, d, d)));
        } else if (suite == "gamma") {
            const int k = rng.uniform_int(1, 3);
            const auto dx = random_valuation_k(rng, k);
            const auto dy = random_valuation_k(rng, k);
            const double w1 = wasserstein(dx, dy).value;
            for (SpaceKind space : {SpaceKind::unit_demand, SpaceKind::implementation}) {
                auto rep = check_sqrt_bound(dx, dy, space, tol, pair_digest(i, dx, dy));
                rep.suite = std::string("sqrt_gamma_") + to_string(space);
                reports.push_back(std::move(rep));
                const double wg = wasserstein_gamma(dx, dy, space).value;
                reports.push_back(make_report(std::string("wgamma_le_2w_") + to_string(space),
                                              pair_digest(i, dx, dy), wg, 2.0 * w1, 1e-9));
            }
        } else {
            std::cerr << "error: unknown suite '" << suite << "'\n";
            return 1;
        }
    }

    if (!out_path.empty()) save_reports_csv(reports, out_path);
    long violations = 0;
    for (const auto& r : reports)
        if (!r.holds && !r.skipped) {
            ++violations;
            std::cerr << "VIOLATION " << r.suite << " " << r.digest << " slack="
                      << format_sig(r.slack) << "\n";
        }
    std::cout << "suite=" << suite << " reports=" << reports.size()
              << " violations=" << violations << "\n";
    return violations == 0 ? 0 : 2;
}

int run_learn(const std::string& target_path, std::size_t n, double eps, std::uint64_t seed,
              const std::string& out_path) {
    const auto dy = load_distribution(target_path);
    const auto rep = learn_pipeline(dy, n, eps, seed);
    const json out = report_to_json(rep);
    std::cout << out.dump(2) << "\n";
    if (!out_path.empty()) {
        std::ofstream f(out_path);
        if (!f) throw std::runtime_error("cannot write " + out_path);
        f << out.dump(2) << "\n";
    }
    const double tol = report_tolerance();
    if (rep.budget_met && rep.regret > 2.0 * eps + tol) {
        std::cerr << "VIOLATION learn regret=" << format_sig(rep.regret)
                  << " exceeds 2*eps with the Wasserstein budget met\n";
        return 2;
    }
    return 0;
}

int run_examples(const std::string& out_dir, double m, double eps, double c) {
    std::filesystem::create_directories(out_dir);
    const auto dir = std::filesystem::path(out_dir);
    json index;
    for (const auto& ex : sharp_examples(m, eps, c)) {
        const auto x_path = dir / (ex.name + "_x.json");
        const auto y_path = dir / (ex.name + "_y.json");
        save_distribution(ex.x, x_path.string());
        save_distribution(ex.y, y_path.string());
        index[ex.name] = {{"rev_x", ex.rev_x}, {"rev_y", ex.rev_y}, {"w", ex.w},
                          {"x", x_path.string()}, {"y", y_path.string()}};
        std::cout << "wrote " << x_path.string() << " and " << y_path.string() << "\n";
    }
    // Constant two-good valuation (1,2): handy smoke instance, Rev = 3.
    const auto const_path = dir / "const12.json";
    save_distribution(point_mass({1.0, 2.0}), const_path.string());
    index["const12"] = {{"rev_x", 3.0}, {"x", const_path.string()}};
    std::cout << "wrote " << const_path.string() << "\n";

    std::ofstream f(dir / "examples_index.json");
    f << index.dump(2) << "\n";
    std::cout << "wrote " << (dir / "examples_index.json").string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"optimal-mechanism revenue, Wasserstein distances, and bound certification"};
    app.require_subcommand(1);

    std::string dist_path, space_name = "additive", klass = "lp", out_path;
    auto* rev = app.add_subcommand("rev", "optimal or class-restricted revenue of a distribution");
    rev->add_option("--dist", dist_path, "distribution JSON/CSV")->required();
    rev->add_option("--space", space_name, "additive|unit_demand|implementation");
    rev->add_option("--class", klass, "lp|myerson|srev|brev|drev");
    rev->add_option("--out", out_path, "write the result JSON here");

    std::string x_path, y_path, cost_name = "l1", plan_path;
    auto* wass = app.add_subcommand("wasserstein", "exact Wasserstein distance between two distributions");
    wass->add_option("--x", x_path, "first distribution")->required();
    wass->add_option("--y", y_path, "second distribution")->required();
    wass->add_option("--cost", cost_name, "l1|linf|gamma:additive|gamma:unit_demand|gamma:implementation");
    wass->add_option("--plan", plan_path, "write the optimal coupling here");

    std::string menu_path, menu_out;
    double eta = 0.0;
    auto* disc = app.add_subcommand("discount", "apply a uniform price discount to a menu");
    disc->add_option("--menu", menu_path, "menu JSON")->required();
    disc->add_option("--eta", eta, "discount rate in (0,1)")->required();
    disc->add_option("--out", menu_out, "write the discounted menu here");

    std::string suite, verify_out;
    long count = 100;
    std::uint64_t seed = 1;
    auto* verify = app.add_subcommand("verify", "run a seeded certification suite");
    verify->add_option("--suite", suite,
                       "sqrt|lambda|corollary|theorem-c|remark-b|remark-e|rescale|gamma")
        ->required();
    verify->add_option("--count", count, "number of instances");
    verify->add_option("--seed", seed, "RNG seed");
    verify->add_option("--out", verify_out, "write the CSV report here");

    std::string target_path, learn_out;
    std::size_t nsamples = 100;
    double eps = 0.2;
    std::uint64_t learn_seed = 1;
    auto* learn = app.add_subcommand("learn", "sample-then-discount learning pipeline");
    learn->add_option("--target", target_path, "target distribution")->required();
    learn->add_option("--n", nsamples, "sample size");
    learn->add_option("--eps", eps, "additive loss target");
    learn->add_option("--seed", learn_seed, "RNG seed");
    learn->add_option("--out", learn_out, "write the learning report here");

    std::string ex_dir = ".";
    double ex_m = 100.0, ex_eps = 0.1, ex_c = 4.0;
    auto* examples = app.add_subcommand("examples", "emit the canned worked-example instances");
    examples->add_option("--out", ex_dir, "output directory");
    examples->add_option("--m", ex_m, "M parameter");
    examples->add_option("--eps", ex_eps, "eps parameter");
    examples->add_option("--c", ex_c, "c parameter");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Normalize every parse failure to the validation exit code; --help
        // stays a success.
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (rev->parsed()) return run_rev(dist_path, space_name, klass, out_path);
        if (wass->parsed()) return run_wasserstein(x_path, y_path, cost_name, plan_path);
        if (disc->parsed()) return run_discount(menu_path, eta, menu_out);
        if (verify->parsed()) return run_verify(suite, count, seed, verify_out);
        if (learn->parsed()) return run_learn(target_path, nsamples, eps, learn_seed, learn_out);
        if (examples->parsed()) return run_examples(ex_dir, ex_m, ex_eps, ex_c);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
