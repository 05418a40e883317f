#include "chb/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "chb/construction.hpp"
#include "chb/field.hpp"
#include "chb/field_io.hpp"
#include "chb/format.hpp"
#include "chb/gamma.hpp"
#include "chb/parallel.hpp"
#include "chb/reduced_model.hpp"
#include "chb/saddle.hpp"

namespace chb {

namespace {

using Json = nlohmann::ordered_json;

const std::map<std::string, Command>& command_names() {
    static const std::map<std::string, Command> names{
        {"constants", Command::constants}, {"reduced", Command::reduced}, {"certify", Command::certify},
        {"path", Command::path},           {"saddle", Command::saddle},   {"gamma", Command::gamma}};
    return names;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_real(const std::string& key, const std::string& text) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || std::isnan(value)) {
        throw ConfigError("key '" + key + "' expects a real number, got '" + text + "'");
    }
    return value;
}

long parse_integer(const std::string& key, const std::string& text) {
    long value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError("key '" + key + "' expects an integer, got '" + text + "'");
    }
    return value;
}

std::vector<double> parse_real_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(parse_real(key, trim(item)));
    if (out.empty()) throw ConfigError("key '" + key + "' expects a comma-separated list of reals");
    return out;
}

std::string join_reals(const std::vector<double>& values) {
    std::string out;
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k) out += ',';
        out += format_double(values[k]);
    }
    return out;
}

void apply_key(RunConfig& c, const std::string& key, const std::string& value) {
    if (key == "command") {
        c.command = parse_command(value);
    } else if (key == "dim") {
        c.dim = static_cast<int>(parse_integer(key, value));
    } else if (key == "phi") {
        c.phi = parse_real(key, value);
    } else if (key == "length") {
        c.length = parse_real(key, value);
    } else if (key == "xi") {
        c.xi = parse_real(key, value);
    } else if (key == "grid") {
        c.grid = static_cast<int>(parse_integer(key, value));
    } else if (key == "images") {
        c.images = static_cast<int>(parse_integer(key, value));
    } else if (key == "R") {
        c.R = parse_real(key, value);
    } else if (key == "kappa") {
        c.kappa = parse_real(key, value);
    } else if (key == "samples") {
        c.samples = static_cast<int>(parse_integer(key, value));
    } else if (key == "threads") {
        const long t = parse_integer(key, value);
        if (t < 0) throw ConfigError("key 'threads' must be >= 0");
        c.threads = static_cast<unsigned>(t);
    } else if (key == "out") {
        c.out = value;
    } else if (key == "input") {
        c.input = value;
    } else if (key == "step") {
        c.step = parse_real(key, value);
    } else if (key == "max_iter") {
        c.max_iter = static_cast<int>(parse_integer(key, value));
    } else if (key == "tol") {
        c.tol = parse_real(key, value);
    } else if (key == "radius") {
        c.radius = parse_real(key, value);
    } else if (key == "phis") {
        c.phis = parse_real_list(key, value);
    } else if (key == "eps0") {
        c.eps0 = parse_real(key, value);
    } else if (key == "resolution") {
        c.resolution = parse_real(key, value);
    } else {
        throw ConfigError("unknown configuration key '" + key + "'");
    }
}

// Full parameter set except where outputs go and how many threads ran.
std::string provenance(const RunConfig& c) {
    std::string line = std::string("# ") + tool_version;
    std::stringstream in(c.to_text());
    std::string entry;
    while (std::getline(in, entry)) {
        if (entry.rfind("out=", 0) == 0 || entry.rfind("threads=", 0) == 0) continue;
        line += ' ' + entry;
    }
    return line;
}

void write_csv(const std::filesystem::path& path, const RunConfig& c, const std::string& body) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << provenance(c) << '\n' << body;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_text(const std::filesystem::path& path, const std::string& body) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << body << '\n';
}

double clamp_width(const RunConfig& c, const ModelParams& p) { return c.R ? *c.R : default_clamp_width(p); }

Json run_constants(const RunConfig& c) {
    const Dimension d(c.dim);
    const auto off = barrier_constant_offcritical(d);
    Json j;
    j["c0"] = interface_cost();
    j["cbar1"] = cbar1(d);
    j["xi_d"] = critical_xi(d);
    j["c_star"] = off.c_star;
    j["nu_m"] = off.nu_m;
    return j;
}

Json run_reduced(const RunConfig& c) {
    const Dimension d(c.dim);
    if (!c.xi) throw ConfigError("reduced needs --xi (a positive number or inf)");
    const Xi xi = std::isinf(*c.xi) ? Xi::infinite() : Xi::finite(*c.xi);
    const auto curve = sample_reduced_curve(xi, d, c.samples);
    if (!c.out.empty()) write_csv(c.out, c, reduced_curve_csv(curve));
    return Json::parse(reduced_curve_summary_json(curve));
}

Json certificate_json(const Certificate& cert, double gap, double truncated_gap) {
    Json j;
    j["V"] = cert.V;
    j["gap"] = gap;
    j["truncated_gap"] = truncated_gap;
    j["bound_offcritical"] = cert.bound_offcritical;
    j["bound_critical"] = cert.bound_critical ? Json(*cert.bound_critical) : Json(nullptr);
    j["hypotheses_ok"] = cert.hypotheses_ok;
    j["critical_hypotheses_ok"] = cert.critical_hypotheses_ok;
    j["sound"] = truncated_gap >= cert.bound_offcritical;
    j["reason"] = cert.reason;
    return j;
}

Json run_certify(const RunConfig& c) {
    CertificateOptions opts;
    opts.eps0 = c.eps0;
    if (!c.input.empty()) {
        const auto snap = read_chf(std::filesystem::path(c.input));
        const ModelParams p(snap.field.dim(), snap.field.length(), snap.phi);
        const auto cert = lower_bound_certificate(snap.field, p, opts);
        const double gap = energy_gap(snap.field, p);
        const double tgap = energy_gap(truncate_excess(snap.field, p, cert.kappa), p);
        return certificate_json(cert, gap, tgap);
    }
    const ModelParams p = c.model_params();
    certificate_coefficients(p.phi, p.d);  // fail fast outside the certificate's range
    const auto path = barrier_path(p, c.grid, clamp_width(c, p), c.images, {c.kappa});
    std::vector<Certificate> certs(path.images.size());
    std::vector<double> tgaps(path.images.size());
    parallel_for(path.images.size(), [&](std::size_t k) {
        certs[k] = lower_bound_certificate(path.images[k], p, opts);
        tgaps[k] = energy_gap(truncate_excess(path.images[k], p, certs[k].kappa), p);
    });
    std::ostringstream csv;
    csv << "t,gap,truncated_gap,V,bound_offcritical,in_window,sound\n";
    int checked = 0;
    int violations = 0;
    for (std::size_t k = 0; k < certs.size(); ++k) {
        const bool in_window = certs[k].V <= c.eps0 * p.volume();
        const bool sound = tgaps[k] >= certs[k].bound_offcritical;
        if (in_window) {
            ++checked;
            if (!sound) ++violations;
        }
        csv << format_double(path.t[k]) << ',' << format_double(path.gap[k]) << ',' << format_double(tgaps[k]) << ','
            << format_double(certs[k].V) << ',' << format_double(certs[k].bound_offcritical) << ','
            << (in_window ? 1 : 0) << ',' << (sound ? 1 : 0) << '\n';
    }
    if (!c.out.empty()) write_csv(c.out, c, csv.str());
    Json j;
    j["images"] = certs.size();
    j["checked"] = checked;
    j["violations"] = violations;
    return j;
}

Json path_json(const PathProfile& path, const ModelParams& p, double R) {
    Json j;
    j["xi"] = p.xi;
    j["regime"] = p.regime();
    j["R"] = R;
    j["images"] = path.images.size();
    j["max_gap"] = path.max_gap;
    j["max_index"] = path.max_index;
    j["end_gap"] = path.end_gap;
    return j;
}

Json run_path(const RunConfig& c) {
    const ModelParams p = c.model_params();
    const double R = clamp_width(c, p);
    const auto path = barrier_path(p, c.grid, R, c.images, {c.kappa});
    if (!c.out.empty()) {
        const std::filesystem::path dir(c.out);
        write_csv(dir / "path.csv", c, path_profile_csv(path));
        write_path_snapshots(dir, path, p.phi);
    }
    return path_json(path, p, R);
}

Json run_saddle(const RunConfig& c) {
    const ModelParams p = c.model_params();
    const double R = clamp_width(c, p);
    const auto initial = barrier_path(p, c.grid, R, c.images, {c.kappa});
    StringOptions opts;
    opts.max_iter = c.max_iter;
    opts.step = c.step;
    opts.tol = c.tol;
    const auto [relaxed, saddle] = string_relax(initial, p, opts);
    const std::string summary = saddle_summary_json(saddle);
    if (!c.out.empty()) {
        const std::filesystem::path dir(c.out);
        write_csv(dir / "path.csv", c, path_profile_csv(relaxed));
        write_text(dir / "saddle.json", summary);
        write_chf(dir / "saddle.chf", saddle.field, p.phi);
    }
    return Json::parse(summary);
}

Json run_gamma(const RunConfig& c) {
    const double xi = c.xi.value_or(2.0);
    const auto sweep = convergence_sweep(LimitSet(c.radius), xi, Dimension(c.dim), c.phis, c.resolution);
    if (!c.out.empty()) write_csv(c.out, c, sweep_csv(sweep));
    return Json::parse(sweep_summary_json(sweep));
}

}  // namespace

std::string to_string(Command c) {
    for (const auto& [name, value] : command_names()) {
        if (value == c) return name;
    }
    return "?";
}

Command parse_command(const std::string& name) {
    const auto it = command_names().find(name);
    if (it == command_names().end()) throw ConfigError("unknown command '" + name + "'");
    return it->second;
}

std::string RunConfig::to_text() const {
    std::ostringstream text;
    text << "command=" << chb::to_string(command) << '\n';
    text << "dim=" << dim << '\n';
    text << "phi=" << format_double(phi) << '\n';
    if (length) text << "length=" << format_double(*length) << '\n';
    if (xi) text << "xi=" << format_double(*xi) << '\n';
    text << "grid=" << grid << '\n';
    text << "images=" << images << '\n';
    if (R) text << "R=" << format_double(*R) << '\n';
    text << "kappa=" << format_double(kappa) << '\n';
    text << "samples=" << samples << '\n';
    text << "threads=" << threads << '\n';
    if (!out.empty()) text << "out=" << out << '\n';
    if (!input.empty()) text << "input=" << input << '\n';
    text << "step=" << format_double(step) << '\n';
    text << "max_iter=" << max_iter << '\n';
    text << "tol=" << format_double(tol) << '\n';
    text << "radius=" << format_double(radius) << '\n';
    text << "phis=" << join_reals(phis) << '\n';
    text << "eps0=" << format_double(eps0) << '\n';
    text << "resolution=" << format_double(resolution) << '\n';
    return text.str();
}

ModelParams RunConfig::model_params() const {
    const Dimension d(dim);
    if (length) return ModelParams(d, *length, phi);
    if (xi) {
        if (!std::isfinite(*xi)) throw ConfigError("torus runs need a finite xi");
        return ModelParams::from_xi(d, *xi, phi);
    }
    throw ConfigError("need --length or --xi to fix the torus size");
}

void validate(const RunConfig& c) {
    if (c.dim < 2) throw ConfigError("dim must be >= 2");
    if (!(c.phi > 0.0 && c.phi < 1.0)) throw ConfigError("phi must lie in (0,1), got " + format_double(c.phi));
    if (c.length && !(*c.length > 0.0 && std::isfinite(*c.length))) throw ConfigError("length must be positive");
    if (c.xi && !(*c.xi > 0.0)) throw ConfigError("xi must be positive");
    if (c.grid < 2) throw ConfigError("grid must be >= 2");
    if (c.images < 3) throw ConfigError("images must be >= 3");
    if (c.R && !(*c.R >= 1.0)) throw ConfigError("R must be >= 1");
    if (!(c.kappa > 0.0 && c.kappa < 0.5)) throw ConfigError("kappa must lie in (0, 1/2)");
    if (c.samples < 2) throw ConfigError("samples must be >= 2");
    if (!(c.step >= 0.0)) throw ConfigError("step must be >= 0");
    if (c.max_iter < 1) throw ConfigError("max_iter must be >= 1");
    if (!(c.tol > 0.0)) throw ConfigError("tol must be positive");
    if (!(c.radius > 0.0)) throw ConfigError("radius must be positive");
    if (c.phis.empty()) throw ConfigError("phis must list at least one value");
    for (std::size_t k = 0; k < c.phis.size(); ++k) {
        if (!(c.phis[k] > 0.0 && c.phis[k] < 1.0)) throw ConfigError("phis entries must lie in (0,1)");
        if (k > 0 && !(c.phis[k] < c.phis[k - 1])) throw ConfigError("phis must be strictly decreasing");
    }
    if (!(c.eps0 > 0.0)) throw ConfigError("eps0 must be positive");
    if (!(c.resolution > 0.0)) throw ConfigError("resolution must be positive");
}

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::stringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value, got '" + line + "'");
        }
        apply_key(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    validate(c);
    return c;
}

int dispatch(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Energy barriers of the Cahn-Hilliard functional on the flat torus", "chb"};
    app.require_subcommand(1, 1);

    struct Flags {
        std::string config;
        int dim = 0;
        double phi = 0.0, length = 0.0, xi = 0.0, R = 0.0, kappa = 0.0, step = 0.0, tol = 0.0, radius = 0.0,
               eps0 = 0.0, resolution = 0.0;
        int grid = 0, images = 0, samples = 0, max_iter = 0;
        unsigned threads = 0;
        std::string out, input, xi_text, phis;
    } f;

    const auto add_flags = [&](CLI::App* sub) {
        sub->add_option("--config", f.config, "key=value configuration file");
        sub->add_option("--dim", f.dim, "spatial dimension d >= 2 (default 2)");
        sub->add_option("--phi", f.phi, "mean offset, mean = -1 + phi (default 0.1)");
        sub->add_option("--length", f.length, "torus side L");
        sub->add_option("--xi", f.xi_text, "phi L^{d/(d+1)}; 'inf' allowed for reduced");
        sub->add_option("--grid", f.grid, "cells per axis n (default 256)");
        sub->add_option("--images", f.images, "path images (default 32)");
        sub->add_option("--R", f.R, "clamp width / seed radius (default from phi)");
        sub->add_option("--kappa", f.kappa, "partition width for V diagnostics (default 0.2)");
        sub->add_option("--samples", f.samples, "reduced curve samples (default 1000)");
        sub->add_option("--threads", f.threads, "worker threads (default CHB_THREADS or cores)");
        sub->add_option("--out", f.out, "output file (reduced, certify, gamma) or directory");
        sub->add_option("--step", f.step, "string method step (default 0.9 of stable bound)");
        sub->add_option("--max-iter", f.max_iter, "string method iterations (default 20000)");
        sub->add_option("--tol", f.tol, "saddle residual tolerance (default 1e-5)");
        sub->add_option("--radius", f.radius, "limit ball radius (default 1)");
        sub->add_option("--phis", f.phis, "comma-separated decreasing phi sweep");
        sub->add_option("--eps0", f.eps0, "isoperimetric window (default 0.05)");
        sub->add_option("--resolution", f.resolution, "gamma grid spacing / phi (default 0.25)");
    };
    for (const auto& [name, cmd] : command_names()) {
        (void)cmd;
        CLI::App* sub = app.add_subcommand(name, "run the " + name + " computation");
        add_flags(sub);
        if (name == "certify") sub->add_option("input", f.input, "CHF1 field to certify (default: barrier path)");
    }

    std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << app.help();
        return 1;
    }

    CLI::App* sub = app.get_subcommands().front();
    const auto set = [&](const std::string& key) {
        CLI::Option* opt = sub->get_option_no_throw(key == "max_iter" ? "--max-iter" : "--" + key);
        return opt != nullptr && opt->count() > 0;
    };

    try {
        RunConfig c;
        if (set("config")) {
            std::ifstream file(f.config);
            if (!file) throw ConfigError("cannot read config file '" + f.config + "'");
            std::stringstream buffer;
            buffer << file.rdbuf();
            c = parse_config(buffer.str());
        }
        c.command = parse_command(sub->get_name());
        if (set("dim")) c.dim = f.dim;
        if (set("phi")) c.phi = f.phi;
        if (set("length")) c.length = f.length;
        if (set("xi")) c.xi = parse_real("xi", f.xi_text);
        if (set("grid")) c.grid = f.grid;
        if (set("images")) c.images = f.images;
        if (set("R")) c.R = f.R;
        if (set("kappa")) c.kappa = f.kappa;
        if (set("samples")) c.samples = f.samples;
        if (set("out")) c.out = f.out;
        if (set("step")) c.step = f.step;
        if (set("max_iter")) c.max_iter = f.max_iter;
        if (set("tol")) c.tol = f.tol;
        if (set("radius")) c.radius = f.radius;
        if (set("phis")) c.phis = parse_real_list("phis", f.phis);
        if (set("eps0")) c.eps0 = f.eps0;
        if (set("resolution")) c.resolution = f.resolution;
        if (!f.input.empty()) c.input = f.input;
        if (set("threads")) {
            c.threads = f.threads;
        } else if (const char* env = std::getenv("CHB_THREADS"); env != nullptr && *env != '\0') {
            const long t = parse_integer("CHB_THREADS", env);
            if (t < 0) throw ConfigError("CHB_THREADS must be >= 0");
            c.threads = static_cast<unsigned>(t);
        }
        validate(c);
        set_thread_count(c.threads);

        Json summary;
        switch (c.command) {
            case Command::constants: summary = run_constants(c); break;
            case Command::reduced: summary = run_reduced(c); break;
            case Command::certify: summary = run_certify(c); break;
            case Command::path: summary = run_path(c); break;
            case Command::saddle: summary = run_saddle(c); break;
            case Command::gamma: summary = run_gamma(c); break;
        }
        out << summary.dump() << '\n';
        return 0;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace chb
