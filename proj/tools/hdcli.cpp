// hdcli: construct the 3g polynomial vector fields solving the differentiation
// problem for hyperelliptic functions (genus 1..3), compute their polynomial
// Lie algebra, and run the verification battery.

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "hyperderiv/report.hpp"
#include "hyperderiv/verify.hpp"

namespace hd = hyperderiv;

namespace {

struct CliOptions {
    hd::RunConfig cfg;
    std::string out;
    bool embed = false;
    int k = 1;
};

void add_common(CLI::App* cmd, CliOptions& o) {
    cmd->add_option("--genus", o.cfg.genus, "curve genus (1..3)")->default_val(1);
    cmd->add_option("--seed", o.cfg.seed, "seed for randomized checks");
    cmd->add_option("--depth", o.cfg.depth, "KdV hierarchy depth K")->default_val(6);
    cmd->add_option("--trunc", o.cfg.trunc, "series truncation order N")->default_val(14);
    cmd->add_option("--tol", o.cfg.tol, "numeric tolerance")->default_val(1e-5);
    cmd->add_option("--format", o.cfg.format, "output format: json|text|latex")
        ->check(CLI::IsMember({"json", "text", "latex"}))
        ->default_val("json");
    cmd->add_option("--out", o.out, "write output to file instead of stdout");
    cmd->add_flag("--parallel", o.cfg.parallel, "run independent checks concurrently");
    cmd->add_flag("--experimental", o.cfg.experimental, "allow genus > 3 (report marked unvalidated)");
}

void check_genus(const CliOptions& o) {
    if (o.cfg.genus < 1) throw CLI::ValidationError("--genus", "genus must be >= 1");
    if (o.cfg.genus > 3 && !o.cfg.experimental)
        throw CLI::ValidationError("--genus", "genus > 3 is unvalidated; pass --experimental to proceed");
}

void write_out(const CliOptions& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file " + o.out);
    f << text;
}

hd::Json json_header(const CliOptions& o, const std::string& command) {
    hd::Json j;
    j["schema"] = hd::kSchemaVersion;
    j["version"] = hd::kVersion;
    j["command"] = command;
    j["genus"] = o.cfg.genus;
    if (o.cfg.genus > 3) j["validated"] = false;
    return j;
}

std::string field_label(int m) { return "L" + std::to_string(m); }

int cmd_derive(CliOptions& o) {
    check_genus(o);
    const auto pipeline = hd::Pipeline::build(o.cfg.genus);
    const auto table = hd::structure_table(pipeline.fields);
    const auto coords = hd::x_coordinates(o.cfg.genus);

    if (o.cfg.format == "json") {
        hd::Json j = json_header(o, "derive");
        hd::Json fields;
        for (const int m : pipeline.fields.labels()) {
            hd::Json imgs;
            for (const auto& v : coords)
                imgs[hd::var_name(v)] = hd::canonical_serialize(pipeline.fields.at(m).image(v));
            fields[field_label(m)] = std::move(imgs);
        }
        j["fields"] = std::move(fields);
        hd::Json brackets;
        for (const auto& [ab, cs] : table.brackets) {
            hd::Json entry;
            for (const auto& [m, c] : cs) entry[field_label(m)] = hd::canonical_serialize(c);
            brackets[field_label(ab.first) + "," + field_label(ab.second)] = std::move(entry);
        }
        j["brackets"] = std::move(brackets);
        write_out(o, j.dump(2) + "\n");
        return 0;
    }

    std::string out;
    const bool latex = o.cfg.format == "latex";
    auto poly = [&](const hd::Polynomial& p) { return hd::render_poly(p, o.cfg.format); };
    for (const int m : pipeline.fields.labels()) {
        out += latex ? "\\mathcal{L}_{" + std::to_string(m) + "}:\n" : field_label(m) + ":\n";
        for (const auto& v : coords) {
            if (latex)
                out += "  \\mathcal{L}_{" + std::to_string(m) + "}\\," + hd::latex_var(v) + " = " +
                       poly(pipeline.fields.at(m).image(v)) + "\\\\\n";
            else
                out += "  " + hd::var_name(v) + " -> " + poly(pipeline.fields.at(m).image(v)) + "\n";
        }
    }
    out += latex ? "% brackets\n" : "brackets:\n";
    for (const auto& [ab, cs] : table.brackets) {
        std::string line;
        if (cs.empty()) line = "0";
        for (const auto& [m, c] : cs) {
            if (!line.empty()) line += " + ";
            line += latex ? "(" + poly(c) + ")\\,\\mathcal{L}_{" + std::to_string(m) + "}"
                          : "(" + poly(c) + ")*" + field_label(m);
        }
        if (latex)
            out += "[\\mathcal{L}_{" + std::to_string(ab.first) + "},\\mathcal{L}_{" +
                   std::to_string(ab.second) + "}] = " + line + "\\\\\n";
        else
            out += "  [" + field_label(ab.first) + "," + field_label(ab.second) + "] = " + line + "\n";
    }
    write_out(o, out);
    return 0;
}

int cmd_pmap(CliOptions& o) {
    check_genus(o);
    const auto pm = hd::eliminate_pmap(o.cfg.genus);
    const auto degrees = hd::pmap_degree_report(pm);
    if (o.cfg.format == "json") {
        hd::Json j = json_header(o, "pmap");
        hd::Json lam, w, deg, trace;
        for (const auto& [s, p] : pm.lambda_polys) lam[std::to_string(s)] = hd::canonical_serialize(p);
        for (const auto& [ab, p] : pm.w_polys)
            w[std::to_string(ab.first) + "," + std::to_string(ab.second)] = hd::canonical_serialize(p);
        for (const auto& [s, d] : degrees) deg[std::to_string(s)] = d;
        j["lambda"] = std::move(lam);
        j["w"] = std::move(w);
        j["degrees"] = std::move(deg);
        write_out(o, j.dump(2) + "\n");
        return 0;
    }
    std::string out;
    auto poly = [&](const hd::Polynomial& p) { return hd::render_poly(p, o.cfg.format); };
    for (const auto& [s, p] : pm.lambda_polys)
        out += (o.cfg.format == "latex" ? "p^*\\lambda_{" + std::to_string(s) + "} = "
                                        : "p*l" + std::to_string(s) + " = ") +
               poly(p) + "\n";
    for (const auto& [ab, p] : pm.w_polys)
        out += (o.cfg.format == "latex"
                    ? "\\wp_{0;" + std::to_string(ab.first) + "," + std::to_string(ab.second) + "} = "
                    : "w[" + std::to_string(ab.first) + "," + std::to_string(ab.second) + "] = ") +
               poly(p) + "\n";
    write_out(o, out);
    return 0;
}

int cmd_kdv(CliOptions& o) {
    if (o.k < 1) throw CLI::ValidationError("k", "k must be >= 1");
    if (o.k > o.cfg.depth)
        throw CLI::ValidationError("k", "k exceeds hierarchy depth K=" + std::to_string(o.cfg.depth) +
                                            " (raise --depth)");
    hd::KdvHierarchy h(o.cfg.depth);
    const hd::FreeElement& phi = h.phi(o.k);
    if (o.embed) check_genus(o);
    if (o.cfg.format == "json") {
        hd::Json j = json_header(o, "kdv");
        j["k"] = o.k;
        j["phi"] = hd::canonical_serialize(phi);
        if (o.embed) j["embedded"] = hd::canonical_serialize(hd::embed_to_x(phi, o.cfg.genus));
        write_out(o, j.dump(2) + "\n");
        return 0;
    }
    std::string out;
    const std::string name = o.cfg.format == "latex" ? "\\Phi_{" + std::to_string(2 * o.k) + "}"
                                                     : "Phi_" + std::to_string(2 * o.k);
    out += name + " = " + hd::render_poly(phi, o.cfg.format) + "\n";
    if (o.embed)
        out += name + "(x) = " + hd::render_poly(hd::embed_to_x(phi, o.cfg.genus), o.cfg.format) + "\n";
    write_out(o, out);
    return 0;
}

int cmd_tangency(CliOptions& o) {
    check_genus(o);
    const int g = o.cfg.genus;
    std::string method = o.cfg.method;
    if (method.empty()) method = (g <= 2 || o.cfg.full_discriminant) ? "divisibility" : "sample";
    hd::Json rows = hd::Json::array();
    std::string text;
    bool all_pass = true;
    if (method == "divisibility") {
        if (g >= 3 && !o.cfg.full_discriminant)
            throw CLI::ValidationError("--method", "divisibility at genus 3 requires --full-discriminant");
        const hd::Polynomial disc = hd::discriminant(g);
        for (int k = 0; k <= 2 * g - 1; ++k) {
            auto h = hd::divisibility_tangency(hd::build_lambda_field(k, g), disc);
            hd::Json row;
            row["field"] = field_label(2 * k);
            row["method"] = "divisibility";
            row["point"] = nullptr;
            row["quotient"] = h ? hd::Json(hd::canonical_serialize(*h)) : hd::Json(nullptr);
            row["pass"] = bool(h);
            all_pass = all_pass && bool(h);
            text += field_label(2 * k) + ": h = " + (h ? hd::canonical_serialize(*h) : "NOT DIVISIBLE") + "\n";
            rows.push_back(std::move(row));
        }
    } else if (method == "sample") {
        for (int k = 0; k <= 2 * g - 1; ++k) {
            const auto rep = hd::sample_singular_tangency(hd::build_lambda_field(k, g), g, o.cfg.trials,
                                                          o.cfg.seed + static_cast<unsigned long long>(k));
            for (const auto& smp : rep.samples) {
                hd::Json row;
                row["field"] = field_label(2 * k);
                row["method"] = "sample";
                hd::Json pt = hd::Json::array();
                for (const auto& l : smp.lambda) pt.push_back(l.str());
                row["point"] = std::move(pt);
                row["pass"] = smp.pass;
                rows.push_back(std::move(row));
            }
            all_pass = all_pass && rep.all_pass();
            text += field_label(2 * k) + ": " + std::to_string(rep.passes) + "/" +
                    std::to_string(rep.trials) + " sampled points tangent\n";
        }
    } else {
        throw CLI::ValidationError("--method", "expected divisibility or sample");
    }
    if (o.cfg.format == "json") {
        hd::Json j = json_header(o, "tangency");
        j["method"] = method;
        j["rows"] = std::move(rows);
        j["all_pass"] = all_pass;
        write_out(o, j.dump(2) + "\n");
    } else {
        write_out(o, text);
    }
    return all_pass ? 0 : 1;
}

int cmd_verify(CliOptions& o) {
    check_genus(o);
    if (o.cfg.numeric && o.cfg.genus != 1)
        throw CLI::ValidationError("--numeric", "numeric verification is genus-1 only");
    auto pipeline = hd::Pipeline::build(o.cfg.genus);
    if (!o.cfg.tamper.empty()) {
        const std::string& t = o.cfg.tamper;
        if (t.size() < 2 || t[0] != 'L') throw CLI::ValidationError("--tamper", "expected a field label like L2");
        pipeline.fields = hd::tamper_field(pipeline.fields, std::stoi(t.substr(1)));
    }
    const auto report = hd::run_verification(pipeline, o.cfg);

    if (o.cfg.format == "json") {
        hd::Json j = json_header(o, "verify");
        hd::Json cfg;
        cfg["seed"] = o.cfg.seed;
        cfg["depth"] = o.cfg.depth;
        cfg["trunc"] = o.cfg.trunc;
        cfg["tol"] = hd::float_str(static_cast<long double>(o.cfg.tol));
        cfg["trials"] = o.cfg.trials;
        cfg["method"] = o.cfg.method.empty() ? hd::Json(nullptr) : hd::Json(o.cfg.method);
        cfg["numeric"] = o.cfg.numeric;
        cfg["full_discriminant"] = o.cfg.full_discriminant;
        cfg["tamper"] = o.cfg.tamper.empty() ? hd::Json(nullptr) : hd::Json(o.cfg.tamper);
        j["config"] = std::move(cfg);
        hd::Json suites = hd::Json::array();
        for (const auto& s : report.suites) {
            hd::Json e;
            e["name"] = s.name;
            e["pass"] = s.pass;
            e["details"] = s.details;
            suites.push_back(std::move(e));
        }
        j["suites"] = std::move(suites);
        j["all_pass"] = report.all_pass;
        write_out(o, j.dump(2) + "\n");
    } else {
        std::string out;
        for (const auto& s : report.suites) {
            char buf[64];
            std::snprintf(buf, sizeof buf, " (%.2fs)", s.seconds);
            out += std::string(s.pass ? "[PASS] " : "[FAIL] ") + s.name + buf + "\n";
            for (const auto& d : s.details) out += "    " + d + "\n";
        }
        out += report.all_pass ? "all suites passed\n" : "FAILURES PRESENT\n";
        write_out(o, out);
    }
    return report.first_failing();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"polynomial vector fields and Lie algebras for hyperelliptic curve coordinates (genus 1..3)"};
    app.require_subcommand(1);
    CliOptions o;

    auto* derive = app.add_subcommand("derive", "build the 3g fields and their structure table");
    add_common(derive, o);

    auto* verify = app.add_subcommand("verify", "run the verification suites");
    add_common(verify, o);
    verify->add_flag("--numeric", o.cfg.numeric, "genus-1 numeric Frobenius-Stickelberger checks");
    verify->add_option("--trials", o.cfg.trials, "sampled tangency trials per field")->default_val(10);
    verify->add_option("--method", o.cfg.method, "tangency method: divisibility|sample");
    verify->add_flag("--full-discriminant", o.cfg.full_discriminant, "expand the genus-3 discriminant");
    verify->add_option("--tamper", o.cfg.tamper, "negative control: perturb one coefficient of a field")
        ->group("");  // test hook, hidden from help

    auto* kdv = app.add_subcommand("kdv", "print the KdV hierarchy polynomial Phi_{2k}");
    kdv->add_option("k", o.k, "hierarchy index k >= 1")->required();
    kdv->add_flag("--embed", o.embed, "also print the image in the x-ring");
    add_common(kdv, o);

    auto* pmap = app.add_subcommand("pmap", "print the projection polynomials p*lambda and w");
    add_common(pmap, o);

    auto* tan = app.add_subcommand("tangency", "discriminant tangency of the lambda-space fields");
    add_common(tan, o);
    tan->add_option("--trials", o.cfg.trials, "sampled points per field")->default_val(10);
    tan->add_option("--method", o.cfg.method, "divisibility|sample");
    tan->add_flag("--full-discriminant", o.cfg.full_discriminant, "expand the genus-3 discriminant");

    CLI11_PARSE(app, argc, argv);

    try {
        if (derive->parsed()) return cmd_derive(o);
        if (verify->parsed()) return cmd_verify(o);
        if (kdv->parsed()) return cmd_kdv(o);
        if (pmap->parsed()) return cmd_pmap(o);
        if (tan->parsed()) return cmd_tangency(o);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
