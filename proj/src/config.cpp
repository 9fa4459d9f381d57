#include "czdg/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

namespace czdg {

std::string format_number(double value) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

bool operator==(const MeshSpec::Inclusion& a, const MeshSpec::Inclusion& b) {
    return a.cx == b.cx && a.cy == b.cy && a.radius == b.radius &&
           a.tag == b.tag;
}

bool operator==(const MeshSpec& a, const MeshSpec& b) {
    bool crack_equal =
        a.crack.has_value() == b.crack.has_value() &&
        (!a.crack ||
         (a.crack->center.x() == b.crack->center.x() &&
          a.crack->center.y() == b.crack->center.y() &&
          a.crack->length == b.crack->length &&
          a.crack->angle_deg == b.crack->angle_deg &&
          a.crack_tol == b.crack_tol));
    if (!crack_equal || a.file != b.file) return false;
    if (!a.generated()) return true;
    return a.width == b.width && a.height == b.height && a.nx == b.nx &&
           a.ny == b.ny && a.crossed == b.crossed &&
           a.inclusions == b.inclusions;
}

bool operator==(const BcSpec& a, const BcSpec& b) {
    if (a.type != b.type) return false;
    switch (a.type) {
        case BcSpec::Type::Prescribed:
            return a.ux.value == b.ux.value && a.ux.is_delta == b.ux.is_delta &&
                   a.uy.value == b.uy.value && a.uy.is_delta == b.uy.is_delta;
        case BcSpec::Type::Traction:
            return a.tx == b.tx && a.ty == b.ty;
        default:
            return true;
    }
}

bool operator==(const ScheduleSpec& a, const ScheduleSpec& b) {
    const NonlinearSettings& s = a.settings;
    const NonlinearSettings& t = b.settings;
    return a.delta_max == b.delta_max && a.steps == b.steps &&
           s.tol_rel == t.tol_rel && s.max_iter == t.max_iter &&
           s.relaxation == t.relaxation && s.max_bisect == t.max_bisect &&
           s.initiation_seed == t.initiation_seed;
}

bool operator==(const OutputSpec& a, const OutputSpec& b) {
    return a.reaction_tag == b.reaction_tag &&
           a.fields_every == b.fields_every;
}

static bool laws_equal(const PureModeLaw& a, const PureModeLaw& b) {
    return a.sigma_max == b.sigma_max && a.u_c == b.u_c;
}

static bool materials_equal(const std::map<int, IsotropicElastic>& a,
                            const std::map<int, IsotropicElastic>& b) {
    if (a.size() != b.size()) return false;
    for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
        if (ia->first != ib->first) return false;
        if (ia->second.E != ib->second.E || ia->second.nu != ib->second.nu)
            return false;
    }
    return true;
}

bool operator==(const Scenario& a, const Scenario& b) {
    if (!(a.mesh == b.mesh) || !materials_equal(a.materials, b.materials))
        return false;
    if (a.gamma0 != b.gamma0 || a.cohesive_enabled != b.cohesive_enabled)
        return false;
    if (a.cohesive_enabled &&
        (!laws_equal(a.cohesive.normal, b.cohesive.normal) ||
         !laws_equal(a.cohesive.tangential, b.cohesive.tangential)))
        return false;
    return a.bcs == b.bcs && a.schedule == b.schedule && a.output == b.output;
}

namespace {

[[noreturn]] void fail(int line, const std::string& message) {
    throw ConfigError("line " + std::to_string(line) + ": " + message);
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& value, int line, const std::string& key) {
    const char* c = value.c_str();
    char* end = nullptr;
    double v = std::strtod(c, &end);
    if (end != c + value.size() || value.empty())
        fail(line, key + " expects a number, got '" + value + "'");
    if (!std::isfinite(v)) fail(line, key + " must be finite");
    return v;
}

int to_int(const std::string& value, int line, const std::string& key) {
    const char* c = value.c_str();
    char* end = nullptr;
    long v = std::strtol(c, &end, 10);
    if (end != c + value.size() || value.empty())
        fail(line, key + " expects an integer, got '" + value + "'");
    if (v < -1000000000L || v > 1000000000L)
        fail(line, key + " is out of range");
    return static_cast<int>(v);
}

std::vector<std::string> split_fields(const std::string& value) {
    std::vector<std::string> out;
    std::istringstream in(value);
    std::string field;
    while (in >> field) out.push_back(field);
    return out;
}

// One key = value occurrence.
struct Entry {
    std::string value;
    int line = 0;
};

using Section = std::map<std::string, Entry>;

struct RawConfig {
    Section mesh, cohesive, schedule, output;
    std::map<int, Section> materials;  // by region tag
    std::map<int, Section> bcs;        // by boundary tag
    std::map<int, Entry> inclusions;   // by index; values live here, not in mesh
    bool has_mesh = false, has_cohesive = false, has_schedule = false,
         has_output = false;
};

int section_tag(const std::string& name, std::size_t dot, int line) {
    std::string suffix = name.substr(dot + 1);
    if (suffix.empty()) fail(line, "section [" + name + "] needs a tag");
    const char* c = suffix.c_str();
    char* end = nullptr;
    long v = std::strtol(c, &end, 10);
    if (end != c + suffix.size() || v < 0 || v > 1000000)
        fail(line, "section [" + name + "] needs a nonnegative integer tag");
    return static_cast<int>(v);
}

RawConfig tokenize(const std::string& text) {
    RawConfig raw;
    Section* current = nullptr;
    std::string current_name;
    int line_no = 0;

    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, "unterminated section name");
            std::string name = trim(line.substr(1, line.size() - 2));
            std::size_t dot = name.find('.');
            if (name == "mesh") {
                if (raw.has_mesh) fail(line_no, "duplicate section [mesh]");
                raw.has_mesh = true;
                current = &raw.mesh;
            } else if (name == "cohesive") {
                if (raw.has_cohesive)
                    fail(line_no, "duplicate section [cohesive]");
                raw.has_cohesive = true;
                current = &raw.cohesive;
            } else if (name == "schedule") {
                if (raw.has_schedule)
                    fail(line_no, "duplicate section [schedule]");
                raw.has_schedule = true;
                current = &raw.schedule;
            } else if (name == "output") {
                if (raw.has_output) fail(line_no, "duplicate section [output]");
                raw.has_output = true;
                current = &raw.output;
            } else if (dot != std::string::npos &&
                       name.compare(0, dot, "material") == 0) {
                int tag = section_tag(name, dot, line_no);
                if (raw.materials.count(tag))
                    fail(line_no, "duplicate section [" + name + "]");
                current = &raw.materials[tag];
            } else if (dot != std::string::npos &&
                       name.compare(0, dot, "bc") == 0) {
                int tag = section_tag(name, dot, line_no);
                if (raw.bcs.count(tag))
                    fail(line_no, "duplicate section [" + name + "]");
                current = &raw.bcs[tag];
            } else {
                fail(line_no, "unknown section [" + name + "]");
            }
            current_name = name;
            continue;
        }

        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail(line_no, "expected 'key = value' or a [section] header");
        if (!current)
            fail(line_no, "key outside of any section");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(line_no, "empty key");
        if (value.empty()) fail(line_no, "empty value for '" + key + "'");

        if (current == &raw.mesh && key.rfind("inclusion.", 0) == 0) {
            std::string suffix = key.substr(10);
            const char* c = suffix.c_str();
            char* end = nullptr;
            long idx = std::strtol(c, &end, 10);
            if (suffix.empty() || end != c + suffix.size() || idx < 1 ||
                idx > 1000000)
                fail(line_no,
                     "inclusion keys are inclusion.1, inclusion.2, ...");
            if (raw.inclusions.count(static_cast<int>(idx)))
                fail(line_no, "duplicate key '" + key + "'");
            raw.inclusions[static_cast<int>(idx)] = {value, line_no};
            continue;
        }
        if (current->count(key))
            fail(line_no,
                 "duplicate key '" + key + "' in [" + current_name + "]");
        (*current)[key] = {value, line_no};
    }
    return raw;
}

// Pulls a key out of the section or reports the leftovers at the end.
class Keys {
public:
    Keys(Section& section, std::string name)
        : section_(section), name_(std::move(name)) {}

    const Entry* get(const std::string& key) {
        auto it = section_.find(key);
        if (it == section_.end()) return nullptr;
        taken_.push_back(key);
        return &it->second;
    }

    const Entry& require(const std::string& key) {
        const Entry* e = get(key);
        if (!e)
            throw ConfigError("[" + name_ + "] is missing required key '" +
                              key + "'");
        return *e;
    }

    void finish() {
        for (const auto& [key, entry] : section_)
            if (std::find(taken_.begin(), taken_.end(), key) == taken_.end())
                fail(entry.line, "unknown key '" + key + "' in [" + name_ +
                                     "]");
    }

private:
    Section& section_;
    std::string name_;
    std::vector<std::string> taken_;
};

MeshSpec parse_mesh_section(RawConfig& raw) {
    MeshSpec spec;
    if (!raw.has_mesh) throw ConfigError("missing required section [mesh]");
    Keys keys(raw.mesh, "mesh");

    if (const Entry* file = keys.get("file")) {
        spec.file = file->value;
        static const char* kGenerated[] = {"width", "height", "nx",
                                           "ny",    "pattern"};
        for (const char* k : kGenerated)
            if (const Entry* e = keys.get(k))
                fail(e->line, std::string("'") + k +
                                  "' does not apply to a mesh file");
        if (!raw.inclusions.empty())
            fail(raw.inclusions.begin()->second.line,
                 "inclusions do not apply to a mesh file");
    } else {
        const Entry& w = keys.require("width");
        const Entry& h = keys.require("height");
        const Entry& nx = keys.require("nx");
        const Entry& ny = keys.require("ny");
        spec.width = to_double(w.value, w.line, "width");
        spec.height = to_double(h.value, h.line, "height");
        spec.nx = to_int(nx.value, nx.line, "nx");
        spec.ny = to_int(ny.value, ny.line, "ny");
        if (spec.width <= 0.0) fail(w.line, "width must be positive");
        if (spec.height <= 0.0) fail(h.line, "height must be positive");
        if (spec.nx < 1) fail(nx.line, "nx must be at least 1");
        if (spec.ny < 1) fail(ny.line, "ny must be at least 1");
        if (const Entry* p = keys.get("pattern")) {
            if (p->value == "crossed")
                spec.crossed = true;
            else if (p->value == "plain")
                spec.crossed = false;
            else
                fail(p->line, "pattern must be 'crossed' or 'plain'");
        }
        for (const auto& [idx, entry] : raw.inclusions) {
            std::vector<std::string> f = split_fields(entry.value);
            if (f.size() != 4)
                fail(entry.line,
                     "inclusion expects 'cx cy radius tag' (4 fields)");
            MeshSpec::Inclusion inc;
            inc.cx = to_double(f[0], entry.line, "inclusion cx");
            inc.cy = to_double(f[1], entry.line, "inclusion cy");
            inc.radius = to_double(f[2], entry.line, "inclusion radius");
            inc.tag = to_int(f[3], entry.line, "inclusion tag");
            if (inc.radius <= 0.0)
                fail(entry.line, "inclusion radius must be positive");
            if (inc.tag <= 0)
                fail(entry.line,
                     "inclusion tag must be positive (0 is the background)");
            spec.inclusions.push_back(inc);
        }
    }

    if (const Entry* c = keys.get("crack")) {
        std::vector<std::string> f = split_fields(c->value);
        if (f.size() != 4)
            fail(c->line,
                 "crack expects 'cx cy length angle_deg' (4 fields)");
        CrackSegment seg;
        seg.center.x() = to_double(f[0], c->line, "crack cx");
        seg.center.y() = to_double(f[1], c->line, "crack cy");
        seg.length = to_double(f[2], c->line, "crack length");
        seg.angle_deg = to_double(f[3], c->line, "crack angle");
        if (seg.length <= 0.0) fail(c->line, "crack length must be positive");
        spec.crack = seg;
    }
    if (const Entry* t = keys.get("crack_tol")) {
        if (!spec.crack)
            fail(t->line, "crack_tol without a crack segment");
        spec.crack_tol = to_double(t->value, t->line, "crack_tol");
        if (spec.crack_tol <= 0.0)
            fail(t->line, "crack_tol must be positive");
    }
    keys.finish();
    return spec;
}

void parse_cohesive_section(RawConfig& raw, Scenario& s) {
    if (!raw.has_cohesive) return;
    Keys keys(raw.cohesive, "cohesive");
    if (const Entry* g = keys.get("gamma0")) {
        s.gamma0 = to_double(g->value, g->line, "gamma0");
        if (s.gamma0 <= 0.0) fail(g->line, "gamma0 must be positive");
    }
    const Entry* sn = keys.get("sigma_max_n");
    const Entry* un = keys.get("u_nc");
    const Entry* st = keys.get("sigma_max_t");
    const Entry* ut = keys.get("u_tc");
    int present = !!sn + !!un + !!st + !!ut;
    if (present != 0 && present != 4) {
        const Entry* any = sn ? sn : un ? un : st ? st : ut;
        fail(any->line,
             "cohesive strengths come as a group: sigma_max_n, u_nc, "
             "sigma_max_t, u_tc");
    }
    if (present == 4) {
        s.cohesive_enabled = true;
        s.cohesive.normal.sigma_max =
            to_double(sn->value, sn->line, "sigma_max_n");
        s.cohesive.normal.u_c = to_double(un->value, un->line, "u_nc");
        s.cohesive.tangential.sigma_max =
            to_double(st->value, st->line, "sigma_max_t");
        s.cohesive.tangential.u_c = to_double(ut->value, ut->line, "u_tc");
        if (s.cohesive.normal.sigma_max <= 0.0)
            fail(sn->line, "sigma_max_n must be positive");
        if (s.cohesive.normal.u_c <= 0.0)
            fail(un->line, "u_nc must be positive");
        if (s.cohesive.tangential.sigma_max <= 0.0)
            fail(st->line, "sigma_max_t must be positive");
        if (s.cohesive.tangential.u_c <= 0.0)
            fail(ut->line, "u_tc must be positive");
    }
    keys.finish();
}

BcSpec::Component parse_component(const Entry& e, const std::string& key) {
    BcSpec::Component c;
    if (e.value == "delta") {
        c.is_delta = true;
    } else {
        c.value = to_double(e.value, e.line, key);
    }
    return c;
}

std::map<int, BcSpec> parse_bc_sections(RawConfig& raw) {
    std::map<int, BcSpec> bcs;
    for (auto& [tag, section] : raw.bcs) {
        std::string name = "bc." + std::to_string(tag);
        Keys keys(section, name);
        const Entry& type = keys.require("type");
        BcSpec bc;
        if (type.value == "clamped") {
            bc.type = BcSpec::Type::Clamped;
        } else if (type.value == "prescribed") {
            bc.type = BcSpec::Type::Prescribed;
            bc.ux = parse_component(keys.require("ux"), "ux");
            bc.uy = parse_component(keys.require("uy"), "uy");
        } else if (type.value == "traction") {
            bc.type = BcSpec::Type::Traction;
            const Entry& tx = keys.require("tx");
            const Entry& ty = keys.require("ty");
            bc.tx = to_double(tx.value, tx.line, "tx");
            bc.ty = to_double(ty.value, ty.line, "ty");
        } else if (type.value == "free") {
            bc.type = BcSpec::Type::Free;
        } else {
            fail(type.line,
                 "type must be clamped, prescribed, traction, or free");
        }
        keys.finish();
        bcs[tag] = bc;
    }
    if (bcs.empty())
        throw ConfigError("at least one [bc.<tag>] section is required");
    return bcs;
}

ScheduleSpec parse_schedule_section(RawConfig& raw) {
    if (!raw.has_schedule)
        throw ConfigError("missing required section [schedule]");
    Keys keys(raw.schedule, "schedule");
    ScheduleSpec spec;
    const Entry& dm = keys.require("delta_max");
    const Entry& st = keys.require("steps");
    spec.delta_max = to_double(dm.value, dm.line, "delta_max");
    spec.steps = to_int(st.value, st.line, "steps");
    if (spec.delta_max <= 0.0) fail(dm.line, "delta_max must be positive");
    if (spec.steps < 1) fail(st.line, "steps must be at least 1");

    NonlinearSettings& n = spec.settings;
    if (const Entry* e = keys.get("tol_rel")) {
        n.tol_rel = to_double(e->value, e->line, "tol_rel");
        if (n.tol_rel <= 0.0) fail(e->line, "tol_rel must be positive");
    }
    if (const Entry* e = keys.get("max_iter")) {
        n.max_iter = to_int(e->value, e->line, "max_iter");
        if (n.max_iter < 1) fail(e->line, "max_iter must be at least 1");
    }
    if (const Entry* e = keys.get("relaxation")) {
        n.relaxation = to_double(e->value, e->line, "relaxation");
        if (n.relaxation <= 0.0 || n.relaxation > 1.0)
            fail(e->line, "relaxation must be in (0, 1]");
    }
    if (const Entry* e = keys.get("max_bisect")) {
        n.max_bisect = to_int(e->value, e->line, "max_bisect");
        if (n.max_bisect < 0) fail(e->line, "max_bisect must be nonnegative");
    }
    if (const Entry* e = keys.get("initiation_seed")) {
        n.initiation_seed = to_double(e->value, e->line, "initiation_seed");
        if (n.initiation_seed < kRigidLambda || n.initiation_seed >= 1.0)
            fail(e->line, "initiation_seed must be in [1e-12, 1)");
    }
    keys.finish();
    return spec;
}

OutputSpec parse_output_section(RawConfig& raw) {
    OutputSpec spec;
    if (!raw.has_output) return spec;
    Keys keys(raw.output, "output");
    if (const Entry* e = keys.get("reaction")) {
        spec.reaction_tag = to_int(e->value, e->line, "reaction");
        if (spec.reaction_tag < -1)
            fail(e->line, "reaction must be a boundary tag or -1");
    }
    if (const Entry* e = keys.get("fields_every")) {
        spec.fields_every = to_int(e->value, e->line, "fields_every");
        if (spec.fields_every < 0)
            fail(e->line, "fields_every must be nonnegative");
    }
    keys.finish();
    return spec;
}

}  // namespace

Scenario parse_config(const std::string& text) {
    RawConfig raw = tokenize(text);
    Scenario s;
    s.mesh = parse_mesh_section(raw);

    for (auto& [tag, section] : raw.materials) {
        std::string name = "material." + std::to_string(tag);
        Keys keys(section, name);
        const Entry& E = keys.require("E");
        const Entry& nu = keys.require("nu");
        double e_val = to_double(E.value, E.line, "E");
        double nu_val = to_double(nu.value, nu.line, "nu");
        if (e_val <= 0.0) fail(E.line, "E must be positive");
        if (nu_val < 0.0 || nu_val >= 0.5)
            fail(nu.line, "nu must be in [0, 0.5)");
        keys.finish();
        s.materials[tag] = IsotropicElastic::from_E_nu(e_val, nu_val);
    }
    if (s.materials.empty())
        throw ConfigError("at least one [material.<tag>] section is required");

    parse_cohesive_section(raw, s);
    s.bcs = parse_bc_sections(raw);
    s.schedule = parse_schedule_section(raw);
    s.output = parse_output_section(raw);
    return s;
}

std::string print_config(const Scenario& s) {
    std::string out;
    auto line = [&out](const std::string& key, const std::string& value) {
        out += key + " = " + value + "\n";
    };

    out += "[mesh]\n";
    if (!s.mesh.generated()) {
        line("file", s.mesh.file);
    } else {
        line("width", format_number(s.mesh.width));
        line("height", format_number(s.mesh.height));
        line("nx", std::to_string(s.mesh.nx));
        line("ny", std::to_string(s.mesh.ny));
        line("pattern", s.mesh.crossed ? "crossed" : "plain");
        for (std::size_t i = 0; i < s.mesh.inclusions.size(); ++i) {
            const MeshSpec::Inclusion& inc = s.mesh.inclusions[i];
            line("inclusion." + std::to_string(i + 1),
                 format_number(inc.cx) + " " + format_number(inc.cy) + " " +
                     format_number(inc.radius) + " " +
                     std::to_string(inc.tag));
        }
    }
    if (s.mesh.crack) {
        line("crack", format_number(s.mesh.crack->center.x()) + " " +
                          format_number(s.mesh.crack->center.y()) + " " +
                          format_number(s.mesh.crack->length) + " " +
                          format_number(s.mesh.crack->angle_deg));
        line("crack_tol", format_number(s.mesh.crack_tol));
    }

    for (const auto& [tag, mat] : s.materials) {
        out += "\n[material." + std::to_string(tag) + "]\n";
        line("E", format_number(mat.E));
        line("nu", format_number(mat.nu));
    }

    out += "\n[cohesive]\n";
    line("gamma0", format_number(s.gamma0));
    if (s.cohesive_enabled) {
        line("sigma_max_n", format_number(s.cohesive.normal.sigma_max));
        line("u_nc", format_number(s.cohesive.normal.u_c));
        line("sigma_max_t", format_number(s.cohesive.tangential.sigma_max));
        line("u_tc", format_number(s.cohesive.tangential.u_c));
    }

    for (const auto& [tag, bc] : s.bcs) {
        out += "\n[bc." + std::to_string(tag) + "]\n";
        switch (bc.type) {
            case BcSpec::Type::Clamped:
                line("type", "clamped");
                break;
            case BcSpec::Type::Prescribed:
                line("type", "prescribed");
                line("ux", bc.ux.is_delta ? "delta"
                                          : format_number(bc.ux.value));
                line("uy", bc.uy.is_delta ? "delta"
                                          : format_number(bc.uy.value));
                break;
            case BcSpec::Type::Traction:
                line("type", "traction");
                line("tx", format_number(bc.tx));
                line("ty", format_number(bc.ty));
                break;
            case BcSpec::Type::Free:
                line("type", "free");
                break;
        }
    }

    out += "\n[schedule]\n";
    line("delta_max", format_number(s.schedule.delta_max));
    line("steps", std::to_string(s.schedule.steps));
    const NonlinearSettings& n = s.schedule.settings;
    line("tol_rel", format_number(n.tol_rel));
    line("max_iter", std::to_string(n.max_iter));
    line("relaxation", format_number(n.relaxation));
    line("max_bisect", std::to_string(n.max_bisect));
    line("initiation_seed", format_number(n.initiation_seed));

    out += "\n[output]\n";
    line("reaction", std::to_string(s.output.reaction_tag));
    line("fields_every", std::to_string(s.output.fields_every));
    return out;
}

}  // namespace czdg
