#include "lambda_soliton/scenario.hpp"

#include "lambda_soliton/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <variant>

namespace lambda_soliton {

namespace {

struct Value {
    std::variant<std::string, real, std::vector<Value>> data;
    int line = 0;
};

[[noreturn]] void fail(int line, const std::string& field, const std::string& what)
{
    std::string msg = "line " + std::to_string(line);
    if (!field.empty())
        msg += ": field '" + field + "'";
    throw Error(ErrorCode::ConfigError, msg + ": " + what);
}

class ValueParser {
public:
    ValueParser(std::string_view text, int line) : text_(text), line_(line) {}

    Value parse_all(const std::string& field)
    {
        Value v = parse(field);
        skip_space();
        if (pos_ != text_.size())
            fail(line_, field, "unexpected trailing text '" + std::string(text_.substr(pos_)) + "'");
        return v;
    }

private:
    void skip_space()
    {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n'
                                       || text_[pos_] == '\r'))
            ++pos_;
    }

    Value parse(const std::string& field)
    {
        skip_space();
        if (pos_ >= text_.size())
            fail(line_, field, "missing value");
        const char c = text_[pos_];
        if (c == '"')
            return {parse_string(field), line_};
        if (c == '[')
            return parse_array(field);
        return {parse_number(field), line_};
    }

    std::string parse_string(const std::string& field)
    {
        ++pos_;
        std::string out;
        while (pos_ < text_.size() && text_[pos_] != '"') {
            char c = text_[pos_++];
            if (c == '\\') {
                if (pos_ >= text_.size())
                    break;
                c = text_[pos_++];
                if (c == 'n')
                    c = '\n';
                else if (c == 't')
                    c = '\t';
                else if (c != '"' && c != '\\')
                    fail(line_, field, std::string("unknown escape \\") + c);
            }
            out += c;
        }
        if (pos_ >= text_.size())
            fail(line_, field, "unterminated string");
        ++pos_;
        return out;
    }

    Value parse_array(const std::string& field)
    {
        ++pos_;
        std::vector<Value> items;
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == ']') {
            ++pos_;
            return {items, line_};
        }
        for (;;) {
            items.push_back(parse(field));
            skip_space();
            if (pos_ >= text_.size())
                fail(line_, field, "unterminated array");
            if (text_[pos_] == ',') {
                ++pos_;
                skip_space();
                if (pos_ < text_.size() && text_[pos_] == ']') {
                    ++pos_;
                    break;
                }
                continue;
            }
            if (text_[pos_] == ']') {
                ++pos_;
                break;
            }
            fail(line_, field, std::string("expected ',' or ']' but found '") + text_[pos_] + "'");
        }
        return {items, line_};
    }

    real parse_number(const std::string& field)
    {
        std::size_t start = pos_;
        if (text_[pos_] == '+')
            start = ++pos_;
        std::size_t end = pos_;
        while (end < text_.size() && text_[end] != ',' && text_[end] != ']' && text_[end] != ' '
               && text_[end] != '\t')
            ++end;
        const std::string_view token = text_.substr(start, end - start);
        real v = 0.0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(v))
            fail(line_, field, "expected a finite number, got '" + std::string(token) + "'");
        pos_ = end;
        return v;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_;
};

std::string strip_comment(const std::string& line)
{
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '\\' && in_string) {
            ++i;
            continue;
        }
        if (line[i] == '"')
            in_string = !in_string;
        else if (line[i] == '#' && !in_string)
            return line.substr(0, i);
    }
    return line;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

int bracket_balance(const std::string& s)
{
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\' && in_string) {
            ++i;
            continue;
        }
        if (s[i] == '"')
            in_string = !in_string;
        else if (!in_string && s[i] == '[')
            ++depth;
        else if (!in_string && s[i] == ']')
            --depth;
    }
    return depth;
}

using Table = std::map<std::string, Value>;

struct Document {
    Table root;
    Table system;
    Table grid;
    std::vector<std::pair<int, Table>> solitons;
};

Document tokenize(const std::string& text)
{
    Document doc;
    Table* current = &doc.root;
    std::string section = "";
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(strip_comment(raw));
        if (line.empty())
            continue;
        if (line == "[[soliton]]") {
            doc.solitons.emplace_back(line_no, Table{});
            current = &doc.solitons.back().second;
            section = "soliton[" + std::to_string(doc.solitons.size() - 1) + "]";
            continue;
        }
        if (line.front() == '[') {
            if (line == "[system]") {
                current = &doc.system;
                section = "system";
            } else if (line == "[grid]") {
                current = &doc.grid;
                section = "grid";
            } else {
                fail(line_no, "", "unknown section " + line);
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(line_no, "", "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        std::string value_text = trim(line.substr(eq + 1));
        const int start_line = line_no;
        while (bracket_balance(value_text) > 0 && std::getline(in, raw)) {
            ++line_no;
            value_text += " " + trim(strip_comment(raw));
        }
        const std::string field = section.empty() ? key : section + "." + key;
        if (key.empty())
            fail(start_line, "", "empty key");
        if (current->count(key))
            fail(start_line, field, "duplicate key");
        (*current)[key] = ValueParser(value_text, start_line).parse_all(field);
    }
    return doc;
}

class Reader {
public:
    Reader(const Table& table, std::string prefix, int header_line)
        : table_(table), prefix_(std::move(prefix)), header_line_(header_line)
    {
    }

    std::string field(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

    const Value* find(const std::string& key) const
    {
        const auto it = table_.find(key);
        if (it == table_.end())
            return nullptr;
        used_.insert(key);
        return &it->second;
    }

    const Value& require(const std::string& key) const
    {
        const Value* v = find(key);
        if (!v)
            fail(header_line_, field(key), "missing");
        return *v;
    }

    real number(const std::string& key, const Value& v) const
    {
        if (const auto* x = std::get_if<real>(&v.data))
            return *x;
        fail(v.line, field(key), "expected a number");
    }

    std::string string(const std::string& key, const Value& v) const
    {
        if (const auto* s = std::get_if<std::string>(&v.data))
            return *s;
        fail(v.line, field(key), "expected a quoted string");
    }

    std::size_t count(const std::string& key, const Value& v, std::size_t minimum) const
    {
        const real x = number(key, v);
        if (x != std::floor(x) || x < static_cast<real>(minimum) || x > 1e9)
            fail(v.line, field(key), "expected an integer >= " + std::to_string(minimum));
        return static_cast<std::size_t>(x);
    }

    void reject_unknown() const
    {
        for (const auto& [k, v] : table_)
            if (!used_.count(k))
                fail(v.line, field(k), "unknown key");
    }

private:
    const Table& table_;
    std::string prefix_;
    int header_line_;
    mutable std::set<std::string> used_;
};

OutputKind parse_output(const std::string& s, int line, const std::string& field)
{
    for (const OutputKind k : {OutputKind::Fields, OutputKind::Density, OutputKind::Imprints, OutputKind::Areas,
                               OutputKind::Residuals})
        if (s == to_string(k))
            return k;
    fail(line, field, "unknown output '" + s + "' (fields, density, imprints, areas, residuals)");
}

SolitonKind parse_kind(const std::string& s, int line, const std::string& field)
{
    for (const SolitonKind k : {SolitonKind::Type1, SolitonKind::Type2, SolitonKind::Type3})
        if (s == to_string(k))
            return k;
    fail(line, field, "unknown kind '" + s + "' (type1, type2, type3)");
}

std::string format_real(real v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string quote(const std::string& s)
{
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        if (c == '\n')
            out += "\\n";
        else if (c == '\t')
            out += "\\t";
        else
            out += c;
    }
    return out + "\"";
}

} // namespace

std::string_view to_string(OutputKind kind)
{
    switch (kind) {
    case OutputKind::Fields: return "fields";
    case OutputKind::Density: return "density";
    case OutputKind::Imprints: return "imprints";
    case OutputKind::Areas: return "areas";
    case OutputKind::Residuals: return "residuals";
    }
    return "?";
}

real ScenarioConfig::tau_ref() const
{
    for (const auto& s : solitons)
        if (s.kind == SolitonKind::Type1)
            return s.tau;
    return solitons.empty() ? 1.0 : solitons.front().tau;
}

Grid ScenarioConfig::physical_grid() const
{
    Grid g;
    const real tr = tau_ref();
    const real kr = kappa_ref();
    g.t_min = grid.t_min * tr;
    g.t_max = grid.t_max * tr;
    g.nt = grid.nt;
    g.z_min = grid.z_min / kr;
    g.z_max = grid.z_max / kr;
    g.nz = grid.nz;
    return g;
}

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b)
{
    if (a.name != b.name || a.system.mu != b.system.mu || !(a.grid == b.grid) || a.outputs != b.outputs
        || a.h_formula != b.h_formula || a.solitons.size() != b.solitons.size())
        return false;
    for (std::size_t k = 0; k < a.solitons.size(); ++k) {
        const auto& x = a.solitons[k];
        const auto& y = b.solitons[k];
        if (x.kind != y.kind || x.tau != y.tau || x.a != y.a)
            return false;
    }
    return true;
}

ScenarioConfig parse_config(const std::string& text)
{
    const Document doc = tokenize(text);
    ScenarioConfig cfg;

    Reader root(doc.root, "", 1);
    if (const Value* v = root.find("name"))
        cfg.name = root.string("name", *v);
    if (const Value* v = root.find("outputs")) {
        const auto* items = std::get_if<std::vector<Value>>(&v->data);
        if (!items)
            fail(v->line, "outputs", "expected an array of strings");
        for (const auto& item : *items)
            cfg.outputs.insert(parse_output(root.string("outputs", item), item.line, "outputs"));
    }
    if (const Value* v = root.find("h_formula")) {
        const std::string f = root.string("h_formula", *v);
        if (f == "compositional")
            cfg.h_formula = HFormula::Compositional;
        else if (f == "paper-printed")
            cfg.h_formula = HFormula::Printed;
        else
            fail(v->line, "h_formula", "expected \"compositional\" or \"paper-printed\"");
    }
    root.reject_unknown();

    Reader sys(doc.system, "system", 1);
    if (const Value* v = sys.find("mu")) {
        cfg.system.mu = sys.number("mu", *v);
        if (!(cfg.system.mu > 0.0))
            fail(v->line, "system.mu", "must be positive");
    }
    sys.reject_unknown();

    Reader grid(doc.grid, "grid", 1);
    auto& g = cfg.grid;
    for (auto [key, slot] : {std::pair{"t_min", &g.t_min}, std::pair{"t_max", &g.t_max},
                             std::pair{"z_min", &g.z_min}, std::pair{"z_max", &g.z_max}})
        if (const Value* v = grid.find(key))
            *slot = grid.number(key, *v);
    for (auto [key, slot, minimum] : {std::tuple{"nt", &g.nt, std::size_t{16}}, std::tuple{"nz", &g.nz, std::size_t{16}},
                                      std::tuple{"t_stride", &g.t_stride, std::size_t{1}},
                                      std::tuple{"z_stride", &g.z_stride, std::size_t{1}}})
        if (const Value* v = grid.find(key))
            *slot = grid.count(key, *v, minimum);
    grid.reject_unknown();
    if (!(g.t_max > g.t_min)) {
        const Value* v = grid.find("t_max");
        fail(v ? v->line : 1, "grid.t_max", "must exceed t_min");
    }
    if (!(g.z_max > g.z_min)) {
        const Value* v = grid.find("z_max");
        fail(v ? v->line : 1, "grid.z_max", "must exceed z_min");
    }

    if (doc.solitons.size() > 3)
        fail(doc.solitons[3].first, "soliton", "at most three solitons are supported");
    for (std::size_t k = 0; k < doc.solitons.size(); ++k) {
        const auto& [header, table] = doc.solitons[k];
        const std::string prefix = "soliton[" + std::to_string(k) + "]";
        Reader r(table, prefix, header);
        SolitonSpec spec;
        const Value& kind = r.require("kind");
        spec.kind = parse_kind(r.string("kind", kind), kind.line, r.field("kind"));
        const Value& tau = r.require("tau");
        spec.tau = r.number("tau", tau);
        if (!(spec.tau > 0.0))
            fail(tau.line, r.field("tau"), "must be positive");
        const Value& a = r.require("a");
        const auto* entries = std::get_if<std::vector<Value>>(&a.data);
        if (!entries || entries->size() != 3)
            fail(a.line, r.field("a"), "expected three [re, im] pairs");
        for (std::size_t i = 0; i < 3; ++i) {
            const auto* pair = std::get_if<std::vector<Value>>(&(*entries)[i].data);
            if (!pair || pair->size() != 2)
                fail(a.line, r.field("a"), "entry " + std::to_string(i) + " is not an [re, im] pair");
            spec.a[i] = complex(r.number("a", (*pair)[0]), r.number("a", (*pair)[1]));
        }
        r.reject_unknown();
        try {
            spec.validate();
        } catch (const Error& e) {
            fail(a.line, r.field("a"), e.what());
        }
        cfg.solitons.push_back(spec);
    }
    return cfg;
}

ScenarioConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::ConfigError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const ScenarioConfig& cfg)
{
    std::ostringstream out;
    out << "name = " << quote(cfg.name) << "\n";
    out << "outputs = [";
    bool first = true;
    for (const auto k : cfg.outputs) {
        out << (first ? "" : ", ") << quote(std::string(to_string(k)));
        first = false;
    }
    out << "]\n";
    out << "h_formula = " << (cfg.h_formula == HFormula::Compositional ? "\"compositional\"" : "\"paper-printed\"")
        << "\n\n";
    out << "[system]\nmu = " << format_real(cfg.system.mu) << "\n\n";
    const auto& g = cfg.grid;
    out << "[grid]\n"
        << "t_min = " << format_real(g.t_min) << "\n"
        << "t_max = " << format_real(g.t_max) << "\n"
        << "nt = " << g.nt << "\n"
        << "z_min = " << format_real(g.z_min) << "\n"
        << "z_max = " << format_real(g.z_max) << "\n"
        << "nz = " << g.nz << "\n"
        << "t_stride = " << g.t_stride << "\n"
        << "z_stride = " << g.z_stride << "\n";
    for (const auto& s : cfg.solitons) {
        out << "\n[[soliton]]\nkind = " << quote(std::string(to_string(s.kind))) << "\n";
        out << "tau = " << format_real(s.tau) << "\n";
        out << "a = [";
        for (int i = 0; i < 3; ++i)
            out << (i ? ", " : "") << "[" << format_real(s.a[i].real()) << ", " << format_real(s.a[i].imag()) << "]";
        out << "]\n";
    }
    return out.str();
}

} // namespace lambda_soliton
