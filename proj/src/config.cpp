#include "halfline/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace halfline {

namespace {

struct Entry {
    std::string value;
    int line = 0;
    mutable bool used = false;
};

using Section = std::map<std::string, Entry>;

struct Parsed {
    std::map<std::string, Section> sections;
    std::map<std::string, int> section_lines;
};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

Parsed parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    Parsed out;
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("malformed section header: " + line, line_no);
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError("empty section name", line_no);
            if (out.sections.count(section))
                throw ConfigError("duplicate section [" + section + "]", line_no);
            out.sections[section] = {};
            out.section_lines[section] = line_no;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value: " + line, line_no);
        if (section.empty()) throw ConfigError("key outside of any section", line_no);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", line_no);
        auto& sec = out.sections[section];
        if (sec.count(key))
            throw ConfigError("duplicate key '" + key + "' in [" + section + "]", line_no);
        sec[key] = Entry{value, line_no, false};
    }
    return out;
}

class SectionView {
  public:
    SectionView(const Parsed& p, const std::string& name) : name_(name) {
        auto it = p.sections.find(name);
        sec_ = it == p.sections.end() ? nullptr : &it->second;
    }

    bool exists() const { return sec_ != nullptr; }
    const std::string& name() const { return name_; }

    const Entry* find(const std::string& key) const {
        if (!sec_) return nullptr;
        auto it = sec_->find(key);
        if (it == sec_->end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        const Entry* e = find(key);
        return e ? e->value : fallback;
    }

    std::string require_string(const std::string& key) const {
        const Entry* e = find(key);
        if (!e)
            throw ConfigError("missing key '" + key + "' in [" + name_ + "]");
        return e->value;
    }

    double get_double(const std::string& key, double fallback) const {
        const Entry* e = find(key);
        return e ? parse_double(*e, key) : fallback;
    }

    double require_double(const std::string& key) const {
        const Entry* e = find(key);
        if (!e) throw ConfigError("missing key '" + key + "' in [" + name_ + "]");
        return parse_double(*e, key);
    }

    int get_int(const std::string& key, int fallback) const {
        const Entry* e = find(key);
        if (!e) return fallback;
        try {
            return std::stoi(e->value);
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "' is not an integer: " + e->value, e->line);
        }
    }

    long long get_ll(const std::string& key, long long fallback) const {
        const Entry* e = find(key);
        if (!e) return fallback;
        try {
            return std::stoll(e->value);
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "' is not an integer: " + e->value, e->line);
        }
    }

    bool get_bool(const std::string& key, bool fallback) const {
        const Entry* e = find(key);
        if (!e) return fallback;
        if (e->value == "true" || e->value == "1" || e->value == "on") return true;
        if (e->value == "false" || e->value == "0" || e->value == "off") return false;
        throw ConfigError("key '" + key + "' is not a boolean: " + e->value, e->line);
    }

    /// NaN-returning variant: the literal "auto" selects the default.
    double get_auto(const std::string& key) const {
        const Entry* e = find(key);
        if (!e || e->value == "auto") return std::nan("");
        return parse_double(*e, key);
    }

    std::vector<double> get_list(const std::string& key) const {
        const Entry* e = find(key);
        if (!e) throw ConfigError("missing key '" + key + "' in [" + name_ + "]");
        std::vector<double> out;
        std::stringstream ss(e->value);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cell = trim(cell);
            if (cell.empty()) continue;
            try {
                out.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError("key '" + key + "' has a non-numeric entry: " + cell, e->line);
            }
        }
        return out;
    }

  private:
    static double parse_double(const Entry& e, const std::string& key) {
        try {
            std::size_t used = 0;
            const double v = std::stod(e.value, &used);
            if (used != e.value.size())
                throw ConfigError("key '" + key + "' is not a number: " + e.value, e.line);
            return v;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "' is not a number: " + e.value, e.line);
        }
    }

    const Section* sec_;
    std::string name_;
};

enum class FieldArity { scalar2, controlled, boundary };

struct BuiltField {
    ScalarField2 scalar2;
    ControlledField controlled;
    ScalarField1 boundary;
    bool is_constant = false;
    double constant = 0.0;
};

BuiltField build_field(const SectionView& sec, FieldArity arity) {
    const std::string kind = sec.require_string("kind");
    BuiltField out;
    if (kind == "constant") {
        const double v = sec.require_double("value");
        out.is_constant = true;
        out.constant = v;
        out.scalar2 = make_constant2(v);
        out.controlled = make_constant3(v);
        out.boundary = make_constant1(v);
    } else if (kind == "polynomial") {
        if (arity == FieldArity::controlled) {
            Poly3 p;
            p.c = sec.get_double("c", 0.0);
            p.cx = sec.get_double("cx", 0.0);
            p.ct = sec.get_double("ct", 0.0);
            p.ca = sec.get_double("ca", 0.0);
            p.cxx = sec.get_double("cxx", 0.0);
            p.cxt = sec.get_double("cxt", 0.0);
            p.cxa = sec.get_double("cxa", 0.0);
            p.ctt = sec.get_double("ctt", 0.0);
            p.cta = sec.get_double("cta", 0.0);
            p.caa = sec.get_double("caa", 0.0);
            out.controlled = make_poly3(p);
        } else if (arity == FieldArity::scalar2) {
            Poly2 p;
            p.c = sec.get_double("c", 0.0);
            p.cx = sec.get_double("cx", 0.0);
            p.ct = sec.get_double("ct", 0.0);
            p.cxx = sec.get_double("cxx", 0.0);
            p.cxt = sec.get_double("cxt", 0.0);
            p.ctt = sec.get_double("ctt", 0.0);
            out.scalar2 = make_poly2(p);
        } else {
            Poly1 p;
            p.c = sec.get_double("c", 0.0);
            p.c1 = sec.get_double("c1", 0.0);
            p.c2 = sec.get_double("c2", 0.0);
            out.boundary = make_poly1(p);
        }
    } else if (kind == "clamped_exp") {
        ClampedExp e;
        e.scale = sec.get_double("scale", 1.0);
        e.gx = sec.get_double("gx", 0.0);
        e.gt = sec.get_double("gt", 0.0);
        e.lo = sec.get_double("lo", -1e300);
        e.hi = sec.get_double("hi", 1e300);
        if (arity == FieldArity::controlled) {
            e.ga = sec.get_double("ga", 0.0);
            out.controlled = make_clamped_exp3(e);
        } else if (arity == FieldArity::scalar2) {
            out.scalar2 = make_clamped_exp2(e);
        } else {
            out.boundary = make_clamped_exp1(e);
        }
    } else if (kind == "table") {
        auto knots = sec.get_list("knots");
        auto values = sec.get_list("values");
        ScalarField1 tab = make_table1(std::move(knots), std::move(values));
        if (arity == FieldArity::controlled) {
            out.controlled = [tab](double x, double, double) { return tab(x); };
        } else if (arity == FieldArity::scalar2) {
            out.scalar2 = [tab](double x, double) { return tab(x); };
        } else {
            out.boundary = tab;
        }
    } else {
        throw ConfigError("unknown field kind '" + kind + "' in [" + sec.name() + "]");
    }
    return out;
}

void fail_on_unused(const Parsed& p) {
    static const std::set<std::string> known = {
        "problem", "sigma",  "drift",     "discount",   "reward",     "boundary_terminal",
        "boundary_lateral",  "mesh",      "scheme",     "iteration",  "montecarlo",
        "assumptions"};
    for (const auto& [name, sec] : p.sections) {
        if (!known.count(name))
            throw ConfigError("unknown section [" + name + "]", p.section_lines.at(name));
        for (const auto& [key, entry] : sec)
            if (!entry.used)
                throw ConfigError("unknown key '" + key + "' in [" + name + "]", entry.line);
    }
}

}  // namespace

RunConfig load_config(const std::string& path) {
    const Parsed parsed = parse_file(path);
    RunConfig rc;

    for (const char* required : {"problem", "sigma", "drift", "discount", "reward",
                                 "boundary_terminal", "boundary_lateral"})
        if (!parsed.sections.count(required))
            throw ConfigError(std::string("missing required section [") + required + "]");

    // [problem]
    {
        SectionView sec(parsed, "problem");
        rc.spec.horizon = sec.require_double("horizon");
        const std::string ctl = sec.get_string("control", "interval");
        if (ctl == "interval") {
            const double lo = sec.require_double("alpha_min");
            const double hi = sec.require_double("alpha_max");
            rc.spec.controls = ControlSet::interval(lo, hi, sec.get_int("n_alpha", 33));
        } else if (ctl == "list") {
            rc.spec.controls = ControlSet::finite(sec.get_list("alphas"));
        } else {
            throw ConfigError("control must be 'interval' or 'list', got " + ctl);
        }
    }

    // Coefficient fields.
    {
        SectionView sec(parsed, "sigma");
        BuiltField f = build_field(sec, FieldArity::scalar2);
        rc.spec.sigma = f.scalar2;
        rc.hints.sigma_constant = f.is_constant;
        rc.hints.sigma_value = f.constant;
    }
    {
        SectionView sec(parsed, "drift");
        BuiltField f = build_field(sec, FieldArity::controlled);
        rc.spec.drift = f.controlled;
        rc.hints.drift_zero = f.is_constant && f.constant == 0.0;
    }
    {
        SectionView sec(parsed, "discount");
        BuiltField f = build_field(sec, FieldArity::controlled);
        rc.spec.discount = f.controlled;
        rc.hints.discount_zero = f.is_constant && f.constant == 0.0;
    }
    {
        SectionView sec(parsed, "reward");
        BuiltField f = build_field(sec, FieldArity::controlled);
        rc.spec.running_reward = f.controlled;
        rc.hints.reward_constant = f.is_constant;
        rc.hints.reward_value = f.constant;
    }
    bool term_zero = false, lat_zero = false;
    {
        SectionView sec(parsed, "boundary_terminal");
        BuiltField f = build_field(sec, FieldArity::boundary);
        rc.spec.boundary.terminal = f.boundary;
        term_zero = f.is_constant && f.constant == 0.0;
    }
    {
        SectionView sec(parsed, "boundary_lateral");
        BuiltField f = build_field(sec, FieldArity::boundary);
        rc.spec.boundary.lateral = f.boundary;
        lat_zero = f.is_constant && f.constant == 0.0;
    }
    rc.hints.beta_zero = term_zero && lat_zero;

    // [mesh]
    {
        SectionView sec(parsed, "mesh");
        if (sec.exists())
            rc.mesh = Mesh(sec.require_double("x_max"), sec.get_int("nx", 161),
                           sec.get_int("nt", 401), rc.spec.horizon);
        else
            rc.mesh = Mesh(rc.mesh.x_max, rc.mesh.n_x, rc.mesh.n_t, rc.spec.horizon);
    }

    // [scheme]
    {
        SectionView sec(parsed, "scheme");
        rc.scheme.theta = sec.get_double("theta", 1.0);
        const std::string ff = sec.get_string("far_field", "linear_extrapolation");
        if (ff == "linear_extrapolation")
            rc.scheme.far_field = FarField::linear_extrapolation;
        else if (ff == "zero_second_derivative")
            rc.scheme.far_field = FarField::zero_second_derivative;
        else if (ff == "homogeneous_neumann")
            rc.scheme.far_field = FarField::homogeneous_neumann;
        else
            throw ConfigError("unknown far_field: " + ff);
        rc.scheme.require_valid();
    }

    // [iteration]
    {
        SectionView sec(parsed, "iteration");
        rc.solve.kappa = sec.get_auto("kappa");
        rc.solve.tol = sec.get_double("tol", 1e-7);
        rc.solve.max_iter = sec.get_int("max_iter", 200);
        rc.solve.m_cal = sec.get_auto("m_cal");
        rc.solve.calibrate_m = sec.get_bool("calibrate", false);
        rc.solve.safety = sec.get_double("safety", 1.5);
    }

    // [montecarlo]
    {
        SectionView sec(parsed, "montecarlo");
        rc.mc.n_paths = sec.get_ll("paths", 100000);
        rc.mc.dt = sec.get_double("dt", 1e-3);
        rc.mc.seed = static_cast<std::uint64_t>(sec.get_ll("seed", 1));
        rc.mc.bridge_correction = sec.get_bool("bridge", true);
        rc.mc.n_workers = sec.get_int("workers", 1);
    }
    rc.solve.seed = rc.mc.seed;

    // [assumptions]
    {
        SectionView sec(parsed, "assumptions");
        rc.plan.n_points = sec.get_int("n_points", 256);
        rc.plan.x_lo = sec.get_double("x_min", 0.0);
        rc.plan.x_hi = sec.get_double("x_max", rc.mesh.x_max);
        rc.plan.seed = static_cast<std::uint64_t>(sec.get_ll("seed", 1));
        rc.plan.check_exit_lipschitz = sec.get_bool("check_exit_time", false);
        rc.plan.mc = rc.mc;
        rc.bounds.sigma_min = sec.get_double("sigma_min", rc.bounds.sigma_min);
        rc.bounds.sigma_max = sec.get_double("sigma_max", rc.bounds.sigma_max);
        rc.bounds.lip_sigma = sec.get_double("lip_sigma", rc.bounds.lip_sigma);
        rc.bounds.beta_bound = sec.get_double("beta_bound", rc.bounds.beta_bound);
        rc.bounds.lip_beta = sec.get_double("lip_beta", rc.bounds.lip_beta);
        rc.bounds.growth_K = sec.get_double("k_bound", rc.bounds.growth_K);
        rc.bounds.coeff_bound = sec.get_double("coeff_bound", rc.bounds.coeff_bound);
        rc.bounds.lip_coeffs = sec.get_double("lip_coeffs", rc.bounds.lip_coeffs);
        rc.bounds.lip_exit = sec.get_double("lip_exit", rc.bounds.lip_exit);
    }

    fail_on_unused(parsed);
    rc.spec.require_valid();
    return rc;
}

}  // namespace halfline
