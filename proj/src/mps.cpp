#include "evac/mps.hpp"

#include <map>
#include <sstream>

namespace evac {

namespace {

std::string field(const std::string& s, size_t width) {
    if (s.size() > width)
        throw std::invalid_argument("MPS field too wide: '" + s + "'");
    return s + std::string(width - s.size(), ' ');
}

std::string value_text(const Rat& r) {
    std::string s = rat_to_string(r);
    if (s.find('/') != std::string::npos || s.size() > 12)
        throw std::invalid_argument("coefficient " + s +
                                    " has no exact fixed-format decimal form");
    return s;
}

// data line: two fields then up to two (name, value) pairs
std::string line2(const std::string& f1, const std::string& f2) {
    std::string s = " " + field(f1, 2) + " " + field(f2, 8);
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s + "\n";
}

std::string line_nv(const std::string& f1, const std::string& f2, const std::string& n1,
                    const std::string& v1) {
    std::string s = " " + field(f1, 2) + " " + field(f2, 8) + "  " + field(n1, 8) + "  " +
                    field(v1, 12);
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s + "\n";
}

}  // namespace

std::string export_mps(const IlpModel& model) {
    std::ostringstream out;
    out << "NAME          EVACPLAN\n";
    out << "OBJSENSE\n    " << (model.maximize ? "MAX" : "MIN") << "\n";
    out << "ROWS\n";
    out << line2("N", "OBJ");
    for (int r = 0; r < (int)model.rows.size(); ++r) {
        const char* rel = model.rows[r].rel == Rel::Eq   ? "E"
                          : model.rows[r].rel == Rel::Le ? "L"
                                                         : "G";
        out << line2(rel, model.row_name(r));
    }
    // column-major coefficient lists
    std::vector<std::vector<std::pair<int, Rat>>> cols(model.n_vars());
    for (int r = 0; r < (int)model.rows.size(); ++r)
        for (const LinTerm& t : model.rows[r].terms) cols[t.var].push_back({r, t.coef});
    std::vector<Rat> obj(model.n_vars(), Rat(0));
    for (const LinTerm& t : model.objective) obj[t.var] += t.coef;

    out << "COLUMNS\n";
    bool in_int = false;
    int marker = 0;
    for (int v = 0; v < model.n_vars(); ++v) {
        if (model.vars[v].integral != in_int) {
            in_int = model.vars[v].integral;
            out << "    " << field("MARKER" + std::to_string(marker++), 8) << "  "
                << field("'MARKER'", 8) << "  " << (in_int ? "'INTORG'" : "'INTEND'")
                << "\n";
        }
        if (obj[v] != 0)
            out << line_nv("", model.var_name(v), "OBJ", value_text(obj[v]));
        for (const auto& [r, coef] : cols[v])
            out << line_nv("", model.var_name(v), model.row_name(r), value_text(coef));
    }
    if (in_int)
        out << "    " << field("MARKER" + std::to_string(marker++), 8) << "  "
            << field("'MARKER'", 8) << "  'INTEND'\n";

    out << "RHS\n";
    if (model.objective_const != 0)
        out << line_nv("", "RHS", "OBJ", value_text(-model.objective_const));
    for (int r = 0; r < (int)model.rows.size(); ++r)
        if (model.rows[r].rhs != 0)
            out << line_nv("", "RHS", model.row_name(r), value_text(model.rows[r].rhs));

    out << "BOUNDS\n";
    for (int v = 0; v < model.n_vars(); ++v) {
        const VarInfo& info = model.vars[v];
        if (!info.lb && !info.ub) {
            out << line_nv("FR", "BND", model.var_name(v), "");
            continue;
        }
        if (!info.lb)
            out << line_nv("MI", "BND", model.var_name(v), "");
        else if (*info.lb != 0)
            out << line_nv("LO", "BND", model.var_name(v), value_text(*info.lb));
        if (info.ub) out << line_nv("UP", "BND", model.var_name(v), value_text(*info.ub));
    }
    out << "ENDATA\n";
    return out.str();
}

IlpModel import_mps(const std::string& text) {
    IlpModel model;
    std::istringstream in(text);
    std::string line, section;
    std::map<std::string, int> row_index;
    std::map<std::string, int> var_index;
    bool in_int = false;
    bool themax = true;
    bool expect_objsense_value = false;

    auto tokens_of = [](const std::string& l) {
        std::istringstream ls(l);
        std::vector<std::string> toks;
        std::string t;
        while (ls >> t) toks.push_back(t);
        return toks;
    };
    auto get_var = [&](const std::string& name) {
        auto it = var_index.find(name);
        if (it != var_index.end()) return it->second;
        int v = model.add_var({in_int, Rat(0), std::nullopt});
        var_index[name] = v;
        return v;
    };

    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '*') continue;
        if (line[0] != ' ') {
            auto toks = tokens_of(line);
            section = toks.empty() ? "" : toks[0];
            expect_objsense_value = section == "OBJSENSE";
            if (section == "ENDATA") break;
            continue;
        }
        auto toks = tokens_of(line);
        if (toks.empty()) continue;
        if (expect_objsense_value) {
            themax = toks[0] == "MAX";
            expect_objsense_value = false;
            continue;
        }
        if (section == "ROWS") {
            if (toks.size() != 2) throw std::invalid_argument("malformed ROWS line: " + line);
            if (toks[0] == "N") continue;  // objective row
            LinRow row;
            row.rel = toks[0] == "E" ? Rel::Eq : toks[0] == "L" ? Rel::Le : Rel::Ge;
            row_index[toks[1]] = (int)model.rows.size();
            model.add_row(std::move(row));
        } else if (section == "COLUMNS") {
            if (toks.size() >= 3 && toks[1] == "'MARKER'") {
                in_int = toks[2] == "'INTORG'";
                continue;
            }
            if (toks.size() < 3 || toks.size() % 2 == 0)
                throw std::invalid_argument("malformed COLUMNS line: " + line);
            int v = get_var(toks[0]);
            for (size_t i = 1; i + 1 < toks.size(); i += 2) {
                Rat coef = rat_from_string(toks[i + 1]);
                if (toks[i] == "OBJ") {
                    model.objective.push_back({v, coef});
                } else {
                    auto it = row_index.find(toks[i]);
                    if (it == row_index.end())
                        throw std::invalid_argument("unknown row '" + toks[i] + "'");
                    model.rows[it->second].terms.push_back({v, coef});
                }
            }
        } else if (section == "RHS") {
            for (size_t i = 1; i + 1 < toks.size(); i += 2) {
                Rat val = rat_from_string(toks[i + 1]);
                if (toks[i] == "OBJ") {
                    model.objective_const = -val;
                } else {
                    auto it = row_index.find(toks[i]);
                    if (it == row_index.end())
                        throw std::invalid_argument("unknown row '" + toks[i] + "'");
                    model.rows[it->second].rhs = val;
                }
            }
        } else if (section == "BOUNDS") {
            if (toks.size() < 3) throw std::invalid_argument("malformed BOUNDS line: " + line);
            auto it = var_index.find(toks[2]);
            if (it == var_index.end())
                throw std::invalid_argument("unknown variable '" + toks[2] + "'");
            VarInfo& info = model.vars[it->second];
            const std::string& kind = toks[0];
            if (kind == "FR") {
                info.lb.reset();
                info.ub.reset();
            } else if (kind == "MI") {
                info.lb.reset();
            } else if (kind == "LO") {
                info.lb = rat_from_string(toks.at(3));
            } else if (kind == "UP") {
                info.ub = rat_from_string(toks.at(3));
            } else if (kind == "FX") {
                info.lb = info.ub = rat_from_string(toks.at(3));
            } else {
                throw std::invalid_argument("unsupported bound kind '" + kind + "'");
            }
        }
    }
    model.maximize = themax;
    return model;
}

std::vector<Rat> import_solution(const std::string& text, const IlpModel& model) {
    std::vector<Rat> a(model.n_vars(), Rat(0));
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string name, value;
        if (!(ls >> name)) continue;
        if (!(ls >> value))
            throw std::invalid_argument("missing value for '" + name + "'");
        auto v = model.var_by_name(name);
        if (!v) throw std::invalid_argument("unknown variable '" + name + "' in solution");
        a[*v] = rat_from_string(value);
    }
    return a;
}

}  // namespace evac
