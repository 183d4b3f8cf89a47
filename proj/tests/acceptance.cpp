// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Heavier than the unit tests; the genus-3 Lie-algebra battery
// dominates the runtime.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "hyperderiv/verify.hpp"
#include "hyperderiv/textio.hpp"
#include "subprocess.hpp"

using namespace hyperderiv;

namespace {

struct Gate {
    int failures = 0;

    void criterion(int id, const std::string& name, const std::function<void()>& body,
                   double budget_seconds = 0) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string error;
        try {
            body();
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool pass = error.empty();
        if (pass && budget_seconds > 0 && secs > budget_seconds) {
            pass = false;
            error = "time budget exceeded (" + std::to_string(secs) + "s > " +
                    std::to_string(budget_seconds) + "s)";
        }
        std::printf("[%s] criterion %d: %s (%.2fs)%s%s\n", pass ? "PASS" : "FAIL", id, name.c_str(), secs,
                    error.empty() ? "" : " -- ", error.c_str());
        std::fflush(stdout);
        if (!pass) ++failures;
    }
};

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::runtime_error(msg);
}

}  // namespace

int main() {
    Gate gate;
    std::map<int, Pipeline> pipelines;

    // 1. Genus-1 pipeline: exact L2 images and the classical structure table.
    gate.criterion(1, "genus-1 derivation and structure table, exact, < 1 s", [&] {
        pipelines.emplace(1, Pipeline::build(1));
        const Pipeline& p = pipelines.at(1);
        require(p.fields.at(2).image(1, 1) == canonical_parse("2/3*x[3,1] - 2*x[1,1]^2", 1), "L2(x11)");
        require(p.fields.at(2).image(2, 1) == canonical_parse("3*x[1,1]*x[2,1]", 1), "L2(x21)");
        require(p.fields.at(2).image(3, 1) == canonical_parse("3*x[2,1]^2 + 2*x[1,1]*x[3,1]", 1), "L2(x31)");
        const auto tab = structure_table(p.fields);
        require(tab.brackets.at({0, 1}).at(1) == Polynomial::constant(1, 1), "[L0,L1] = L1");
        require(tab.brackets.at({0, 2}).at(2) == Polynomial::constant(1, 2), "[L0,L2] = 2 L2");
        require(tab.brackets.at({1, 2}).size() == 1 && tab.brackets.at({1, 2}).at(1) == x_poly(1, 1, 1),
                "[L1,L2] = x11 L1");
    }, 1.0);

    // 2. Relation suite for g = 1, 2, 3.
    gate.criterion(2, "relations vanish after substitution, degrees <= 3, g = 1..3, < 10 s", [&] {
        for (int g = 1; g <= 3; ++g) {
            if (!pipelines.count(g)) pipelines.emplace(g, Pipeline::build(g));
            const SuiteResult r = suites::relations(pipelines.at(g));
            require(r.pass, "relation suite failed at genus " + std::to_string(g));
            for (const auto& [s, d] : pmap_degree_report(pipelines.at(g).pm))
                require(d <= 3, "degree bound at genus " + std::to_string(g));
        }
    }, 10.0);

    // 3. KdV suite.
    gate.criterion(3, "KdV recursion exact for k <= 5; embed(Phi_4) - 1/2 p*l4 = x[1,3] (g >= 2)", [&] {
        KdvHierarchy h(6);
        for (int k = 1; k <= 5; ++k) {
            const auto step = kdv_step(free_derive(h.phi(k)));
            require(step.has_value(), "non-exact integrand at k=" + std::to_string(k));
            require(free_derive(h.phi(k + 1)) == *step, "recursion mismatch at k=" + std::to_string(k));
        }
        for (int g = 2; g <= 3; ++g) {
            const auto& pm = pipelines.at(g).pm;
            require(embed_to_x(h.phi(2), g) - Rational(1, 2) * pm.lambda(4) == x_poly(1, 3, g),
                    "cross identity at genus " + std::to_string(g));
        }
    });

    // 4. Lie-algebra suite for g = 1, 2, 3.
    const auto lie_battery = [&](int g) {
        const Pipeline& p = pipelines.at(g);
        RunConfig cfg;
        cfg.genus = g;
        require(suites::com1(p).pass, "com1");
        require(suites::projectability(p).pass, "projectability");
        require(suites::closure(p).pass, "closure");
        require(suites::jacobi(p, kDefaultSeed).pass, "jacobi");
        require(suites::independence(p, kDefaultSeed).pass, "independence");
        const auto tab = structure_table(p.fields);
        require(tab.brackets.size() == static_cast<std::size_t>(3 * g * (3 * g - 1) / 2), "bracket count");
        for (const auto& [ab, cs] : tab.brackets) {
            if (ab.first % 2 == 1 && ab.second % 2 == 1) require(cs.empty(), "odd-odd bracket nonzero");
            for (const auto& [m, c] : cs)
                require(c.is_homogeneous_of(ab.first + ab.second - m), "coefficient weight");
        }
    };
    gate.criterion(4, "Lie-algebra suite, genus 1", [&] { lie_battery(1); });
    gate.criterion(4, "Lie-algebra suite, genus 2, < 1 min", [&] { lie_battery(2); }, 60.0);
    gate.criterion(4, "Lie-algebra suite, genus 3, < 30 min", [&] { lie_battery(3); }, 1800.0);

    // 5. Tangency.
    gate.criterion(5, "divisibility tangency exact (g <= 2, genus-1 quotients 12 and 0); sampled 10/10 (g = 3)", [&] {
        const Polynomial disc1 = discriminant(1);
        const auto h0 = divisibility_tangency(build_lambda_field(0, 1), disc1);
        require(h0 && *h0 == Polynomial::constant(1, 12), "genus-1 L0 quotient");
        const auto h2 = divisibility_tangency(build_lambda_field(1, 1), disc1);
        require(h2 && h2->is_zero(), "genus-1 L2 quotient");
        const Polynomial disc2 = discriminant(2);
        for (int k = 0; k <= 3; ++k)
            require(divisibility_tangency(build_lambda_field(k, 2), disc2).has_value(),
                    "genus-2 divisibility at k=" + std::to_string(k));
        for (int k = 0; k <= 5; ++k) {
            const auto rep = sample_singular_tangency(build_lambda_field(k, 3), 3, 10,
                                                      kDefaultSeed + static_cast<unsigned long long>(k));
            require(rep.passes == 10, "genus-3 sampled tangency at k=" + std::to_string(k));
        }
    });

    // 6. Numeric Frobenius-Stickelberger anchor at genus 1.
    gate.criterion(6, "numeric FS identities at 15 samples, |err| < 1e-5; tamper control fails", [&] {
        const Pipeline& p = pipelines.at(1);
        const auto samples = default_g1_samples();
        require(samples.size() >= 15, "sample count");
        const auto gen = verify_genus1_generators(p.fields, p.pm, samples, 1e-6L);
        require(gen.all_pass, "generator identities");
        const auto br = verify_genus1_brackets(p.fields, samples, 1e-5L);
        require(br.all_pass, "bracket identities");
        // negative control
        Pipeline tampered;
        tampered.genus = 1;
        tampered.pm = p.pm;
        tampered.fields = tamper_field(p.fields, 2);
        require(!suites::projectability(tampered).pass, "tamper must break projectability");
        require(!verify_genus1_generators(tampered.fields, tampered.pm, samples, 1e-6L).all_pass,
                "tamper must break the numeric anchor");
    });

    // 7. Determinism and golden regression through the CLI.
    gate.criterion(7, "golden JSON for derive g = 1, 2 byte-stable and matching the committed files", [&] {
        const std::string bin = testutil::hdcli_bin();
        for (int g = 1; g <= 2; ++g) {
            const auto a = testutil::run_command(bin + " derive --genus " + std::to_string(g));
            const auto b = testutil::run_command(bin + " derive --genus " + std::to_string(g));
            require(a.exit_code == 0, "derive exit code");
            require(a.output == b.output, "derive output not byte-stable");
            const std::string golden =
                testutil::read_file(testutil::golden_dir() + "/derive_g" + std::to_string(g) + ".json");
            require(a.output == golden, "derive output differs from the golden file (genus " +
                                            std::to_string(g) + ")");
        }
    });

    if (gate.failures == 0) {
        std::printf("acceptance: all criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criterion(s) FAILED\n", gate.failures);
    return 1;
}
