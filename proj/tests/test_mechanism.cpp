#include <doctest.h>

#include <cmath>

#include "revcont/mechanism.hpp"
#include "revcont/theorem_harness.hpp"
#include "revcont/valuation.hpp"
#include "support/tie_sets.hpp"

using namespace revcont;
using testsupport::tie_set;
using testsupport::tie_sets_equal;

namespace {

Menu posted_price(double p) {
    return make_menu({{{1.0}, p}}, {SpaceKind::additive, 1});
}

}  // namespace

TEST_CASE("best response to a posted price") {
    const auto menu = posted_price(1.0);

    const auto buy = best_response(menu, {1.01});
    CHECK(buy.entry == 0);
    CHECK(buy.payment == 1.0);

    const auto pass = best_response(menu, {0.99});
    CHECK(pass.entry == -1);
    CHECK(pass.payment == 0.0);

    // Exact indifference: the priced entry wins (seller-favorable).
    const auto tie = best_response(menu, {1.0});
    CHECK(tie.entry == 0);
    CHECK(tie.payment == 1.0);
}

TEST_CASE("best response tie-breaking is max payment then lowest index") {
    Menu menu = make_menu({{{0.5}, 0.0}, {{1.0}, 1.0}, {{1.0}, 1.0}},
                          {SpaceKind::additive, 1});
    // At x = 2 both priced entries give utility 1, the free one gives 1 too;
    // payment breaks the tie, then the lower index.
    const auto br = best_response(menu, {2.0});
    CHECK(br.entry == 1);
    CHECK(br.payment == 1.0);
}

TEST_CASE("revenue on the worked examples") {
    CHECK(revenue(posted_price(1.0), point_mass({1.0})) == 1.0);

    const auto heavy = validate({{100.0}, {0.0}}, {0.01, 0.99});
    CHECK(revenue(posted_price(100.0), heavy) == doctest::Approx(1.0).epsilon(1e-12));

    const auto zero = point_mass({0.0, 0.0});
    const auto menu = make_menu({{{1.0, 0.5}, 2.0}, {{0.2, 0.9}, 0.7}},
                                {SpaceKind::additive, 2});
    CHECK(revenue(menu, zero) == 0.0);
}

TEST_CASE("rescale and discount transform prices only") {
    const auto menu = posted_price(2.5);
    const auto same = rescale(menu, 1.0);
    CHECK(same.entries[0].s == 2.5);

    const auto doubled = rescale(menu, 2.0);
    CHECK(doubled.entries[0].s == 5.0);
    CHECK(doubled.entries[0].q == menu.entries[0].q);

    const auto discounted = discount(posted_price(1.0), 0.02);
    CHECK(discounted.entries[0].s == doctest::Approx(0.98).epsilon(1e-15));

    const auto halved = discount(posted_price(1.0), 0.5);
    CHECK(halved.entries[0].s == 0.5);

    CHECK_THROWS_AS(rescale(menu, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(discount(menu, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(discount(menu, 1.0), std::invalid_argument);
}

TEST_CASE("rescaled menus extract lambda times the revenue from lambda X") {
    Rng rng(53);
    for (int t = 0; t < 500; ++t) {
        const int k = rng.uniform_int(1, 3);
        const auto menu = random_menu(rng, {SpaceKind::additive, k});
        const auto d = random_valuation_k(rng, k, 6);
        const double lambda = rng.uniform(0.2, 5.0);
        const double lhs = revenue(rescale(menu, lambda), scale(d, lambda));
        const double rhs = lambda * revenue(menu, d);
        CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("menu-rescale consistency at the point level") {
    Rng rng(59);
    for (int t = 0; t < 1000; ++t) {
        const int k = rng.uniform_int(1, 3);
        const auto space = AllocationSpace{SpaceKind::additive, k};
        const auto menu = random_menu(rng, space);
        const auto x = random_point(rng, k);
        const double lambda = rng.uniform(0.2, 5.0);

        ValuationPoint lx(x);
        for (double& v : lx) v *= lambda;

        auto scaled_side = tie_set(rescale(menu, lambda), lx);
        for (auto& c : scaled_side) c.payment /= lambda;
        const auto base_side = tie_set(menu, x);
        CHECK(tie_sets_equal(scaled_side, base_side, 1e-9));
    }
}

TEST_CASE("discount consistency at the point level") {
    Rng rng(61);
    for (int t = 0; t < 1000; ++t) {
        const int k = rng.uniform_int(1, 3);
        const auto kind = static_cast<SpaceKind>(t % 3);
        const auto menu = random_menu(rng, {kind, k});
        const auto x = random_point(rng, k);
        const double eta = rng.uniform(0.05, 0.9);

        ValuationPoint boosted(x);
        for (double& v : boosted) v /= (1.0 - eta);

        auto discounted_side = tie_set(discount(menu, eta), x);
        for (auto& c : discounted_side) c.payment /= (1.0 - eta);
        const auto base_side = tie_set(menu, boosted);
        CHECK(tie_sets_equal(discounted_side, base_side, 1e-9));
    }
}

TEST_CASE("lemma 1 on hand instances") {
    const auto menu = posted_price(1.0);
    const auto rep = verify_lemma1(menu, {0.99}, {0.99}, 2.0);
    CHECK(rep.holds);
    CHECK(rep.lhs == 0.0);
    CHECK(rep.rhs == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(verify_lemma1(menu, {1.0}, {1.0}, 1.0), std::invalid_argument);
}

TEST_CASE("lemma 1 fuzz including x == y payment monotonicity") {
    Rng rng(67);
    for (int t = 0; t < 3000; ++t) {
        const int k = rng.uniform_int(1, 3);
        const auto kind = static_cast<SpaceKind>(t % 3);
        const auto menu = random_menu(rng, {kind, k});
        const auto x = random_point(rng, k);
        const auto y = (t % 5 == 0) ? x : random_point(rng, k);
        const double lambda = 1.0 + rng.uniform_pos() * 4.0;
        CHECK(verify_lemma1(menu, x, y, lambda).holds);
    }
}

TEST_CASE("check_ic_ir: menus induce clean tables, envy is reported") {
    Rng rng(71);
    for (int t = 0; t < 200; ++t) {
        const int k = rng.uniform_int(1, 3);
        const auto menu = random_menu(rng, {static_cast<SpaceKind>(t % 3), k});
        std::vector<ValuationPoint> types;
        for (int j = 0; j < 5; ++j) types.push_back(random_point(rng, k));
        CHECK(check_ic_ir(induced_table(menu, types)).ok());
    }

    DirectMechanismTable bad;
    bad.types = {{1.0}, {2.0}};
    bad.allocations = {{0.0}, {1.0}};
    bad.payments = {0.0, 0.5};
    // Type 1 gets nothing for free but envies type 2's entry (utility 0 vs 0.5).
    const auto rep = check_ic_ir(bad);
    REQUIRE(rep.ic_violations.size() == 1);
    CHECK(rep.ic_violations[0] == std::pair<std::size_t, std::size_t>{0, 1});
    CHECK(rep.ir_violations.empty());

    DirectMechanismTable irbad;
    irbad.types = {{1.0}};
    irbad.allocations = {{0.5}};
    irbad.payments = {2.0};
    CHECK(check_ic_ir(irbad).ir_violations.size() == 1);
}

TEST_CASE("mechanism classes") {
    const auto sep = separate_menu({1.0, 2.0});
    REQUIRE(sep.entries.size() == 4);
    std::vector<double> prices;
    for (const auto& e : sep.entries) prices.push_back(e.s);
    std::sort(prices.begin(), prices.end());
    CHECK(prices == std::vector<double>{0.0, 1.0, 2.0, 3.0});
    CHECK(menu_size(sep) == 3);

    const auto bundle = bundle_menu(2, 3.0);
    CHECK(revenue(bundle, point_mass({1.0, 2.0})) == 3.0);
    CHECK(is_deterministic(bundle));
    CHECK(is_deterministic(sep));
    CHECK(!is_deterministic(make_menu({{{0.5, 0.0}, 1.0}}, {SpaceKind::additive, 2})));
    CHECK(menu_size(bundle) == 1);

    CHECK_THROWS_AS(separate_menu({-1.0}), std::invalid_argument);
    CHECK_THROWS_AS(bundle_menu(2, -3.0), std::invalid_argument);

    // Discounting keeps the structural class: separate stays separate-shaped
    // (subset allocations, additive prices), bundles stay bundles.
    const auto dsep = discount(sep, 0.25);
    CHECK(is_deterministic(dsep));
    for (std::size_t mask = 0; mask < 4; ++mask) {
        double want = 0.0;
        if (mask & 1) want += 0.75 * 1.0;
        if (mask & 2) want += 0.75 * 2.0;
        bool found = false;
        for (const auto& e : dsep.entries) {
            const bool q_match = e.q[0] == ((mask & 1) ? 1.0 : 0.0) &&
                                 e.q[1] == ((mask & 2) ? 1.0 : 0.0);
            if (q_match && std::abs(e.s - want) < 1e-12) found = true;
        }
        CHECK(found);
    }
    const auto dbundle = discount(bundle, 0.5);
    CHECK(dbundle.entries.size() == 1);
    CHECK(dbundle.entries[0].s == 1.5);
}

TEST_CASE("revenue never exceeds expected l1 mass") {
    Rng rng(73);
    for (int t = 0; t < 500; ++t) {
        const int k = rng.uniform_int(1, 3);
        const auto menu = random_menu(rng, {SpaceKind::additive, k});
        const auto d = random_valuation_k(rng, k, 6);
        const double r = revenue(menu, d);
        CHECK(r >= 0.0);
        CHECK(r <= expected_l1(d) + 1e-9);
    }
}

TEST_CASE("menu validation") {
    CHECK_THROWS_AS(make_menu({{{1.5}, 1.0}}, {SpaceKind::additive, 1}), std::invalid_argument);
    CHECK_THROWS_AS(make_menu({{{0.5}, -1.0}}, {SpaceKind::additive, 1}), std::invalid_argument);
    CHECK_THROWS_AS(make_menu({{{0.7, 0.7}, 1.0}}, {SpaceKind::unit_demand, 2}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_menu({{{0.7, 0.7}, 1.0}}, {SpaceKind::implementation, 2}),
                    std::invalid_argument);
    const auto impl = make_menu({{{0.3, 0.7}, 1.0}}, {SpaceKind::implementation, 2});
    CHECK(!impl.has_null);
}
