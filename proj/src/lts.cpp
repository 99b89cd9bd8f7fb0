#include "branchmin/lts.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <tuple>
#include <unordered_map>

namespace branchmin {

index_t ActionTable::find(std::string_view name) const {
    for (index_t i = 0; i < size(); ++i)
        if (labels[i] == name) return i;
    return npos;
}

index_t ActionTable::intern(std::string_view name, bool is_internal) {
    index_t i = find(name);
    if (i != npos) return i;
    labels.emplace_back(name);
    internal.push_back(is_internal);
    return size() - 1;
}

void normalize(Lts& lts) {
    auto& ts = lts.transitions;
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
}

bool same_lts(const Lts& a, const Lts& b) {
    if (a.n != b.n || a.initial != b.initial || a.m() != b.m()) return false;
    using Key = std::tuple<index_t, std::string_view, index_t, bool>;
    auto keys = [](const Lts& l) {
        std::vector<Key> out;
        out.reserve(l.m());
        for (const auto& t : l.transitions)
            out.emplace_back(t.src, l.actions.labels[t.label], t.tgt, l.actions.is_internal(t.label));
        std::sort(out.begin(), out.end());
        return out;
    };
    return keys(a) == keys(b);
}

StateMap StateMap::identity(index_t n) {
    StateMap s;
    s.map.resize(n);
    for (index_t i = 0; i < n; ++i) s.map[i] = i;
    return s;
}

StateMap StateMap::then(const StateMap& next) const {
    StateMap out;
    out.map.resize(map.size());
    for (std::size_t i = 0; i < map.size(); ++i)
        out.map[i] = map[i] == npos ? npos : next.map[map[i]];
    return out;
}

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

bool is_default_internal(std::string_view label) { return label == "tau" || label == "i"; }

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool parse_uint(std::string_view s, std::uint64_t& out) {
    s = trim(s);
    if (s.empty()) return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
}

struct Header {
    std::uint64_t initial, m, n;
};

Header parse_header(std::string_view line, std::size_t lineno) {
    line = trim(line);
    if (line.substr(0, 3) != "des") throw ParseError(lineno, "malformed header: expected 'des (I, M, N)'");
    line = trim(line.substr(3));
    if (line.size() < 2 || line.front() != '(' || line.back() != ')')
        throw ParseError(lineno, "malformed header: expected 'des (I, M, N)'");
    line = line.substr(1, line.size() - 2);
    std::uint64_t v[3];
    for (int k = 0; k < 3; ++k) {
        auto comma = line.find(',');
        if ((k < 2) != (comma != std::string_view::npos))
            throw ParseError(lineno, "malformed header: expected three fields");
        auto field = k < 2 ? line.substr(0, comma) : line;
        if (!parse_uint(field, v[k])) throw ParseError(lineno, "malformed header: bad number");
        if (k < 2) line = line.substr(comma + 1);
    }
    Header h{v[0], v[1], v[2]};
    if (h.n == 0) throw ParseError(lineno, "malformed header: state count must be positive");
    if (h.n > npos - 1) throw ParseError(lineno, "malformed header: too many states");
    if (h.initial >= h.n) throw ParseError(lineno, "initial state " + std::to_string(h.initial) + " >= n");
    return h;
}

}  // namespace

Lts parse_aut(std::istream& in) {
    Lts lts;
    std::string buf;
    std::size_t lineno = 0;
    bool have_header = false;
    Header h{};
    std::uint64_t count = 0;
    std::unordered_map<std::string, index_t> label_ids;

    while (std::getline(in, buf)) {
        ++lineno;
        if (!buf.empty() && buf.back() == '\r') buf.pop_back();
        std::string_view line = trim(buf);
        if (line.empty()) continue;
        if (!have_header) {
            h = parse_header(line, lineno);
            have_header = true;
            lts.n = static_cast<index_t>(h.n);
            lts.initial = static_cast<index_t>(h.initial);
            lts.transitions.reserve(std::min<std::uint64_t>(h.m, 1u << 24));
            continue;
        }
        if (line.front() != '(' || line.back() != ')') {
            if (line.front() == '(' && std::count(line.begin(), line.end(), '"') == 1)
                throw ParseError(lineno, "unterminated quote");
            throw ParseError(lineno, "malformed transition: expected '(src, label, tgt)'");
        }
        line = line.substr(1, line.size() - 2);
        auto first = line.find(',');
        auto last = line.rfind(',');
        if (first == std::string_view::npos || first == last)
            throw ParseError(lineno, "malformed transition: expected three fields");
        std::uint64_t src, tgt;
        if (!parse_uint(line.substr(0, first), src) || !parse_uint(line.substr(last + 1), tgt))
            throw ParseError(lineno, "malformed transition: bad state index");
        if (src >= h.n || tgt >= h.n)
            throw ParseError(lineno, "state index " + std::to_string(std::max(src, tgt)) + " >= n (" +
                                         std::to_string(h.n) + ")");
        std::string_view label = trim(line.substr(first + 1, last - first - 1));
        if (!label.empty() && label.front() == '"') {
            if (label.size() < 2 || label.back() != '"') throw ParseError(lineno, "unterminated quote");
            label = label.substr(1, label.size() - 2);
        } else {
            if (label.empty()) throw ParseError(lineno, "empty label");
            for (char c : label)
                if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == '(' || c == ')' || c == '"')
                    throw ParseError(lineno, "invalid character in unquoted label");
        }
        std::string key(label);
        auto it = label_ids.find(key);
        index_t id;
        if (it == label_ids.end()) {
            id = lts.actions.size();
            lts.actions.labels.push_back(key);
            lts.actions.internal.push_back(is_default_internal(key));
            label_ids.emplace(std::move(key), id);
        } else {
            id = it->second;
        }
        lts.transitions.push_back({static_cast<index_t>(src), id, static_cast<index_t>(tgt)});
        ++count;
    }
    if (!have_header) throw ParseError(lineno == 0 ? 1 : lineno, "malformed header: empty input");
    if (count != h.m)
        throw ParseError(lineno, "transition count mismatch: header declares " + std::to_string(h.m) +
                                     ", found " + std::to_string(count));
    normalize(lts);
    return lts;
}

Lts parse_aut(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_aut(in);
}

Lts read_aut_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return parse_aut(in);
}

void write_aut(std::ostream& out, const Lts& lts) {
    out << "des (" << lts.initial << ',' << lts.m() << ',' << lts.n << ")\n";
    std::vector<Transition> ts = lts.transitions;
    std::sort(ts.begin(), ts.end());
    for (const auto& t : ts) out << '(' << t.src << ",\"" << lts.actions.labels[t.label] << "\"," << t.tgt << ")\n";
}

std::string write_aut(const Lts& lts) {
    std::ostringstream out;
    write_aut(out, lts);
    return out.str();
}

void write_aut_file(const std::string& path, const Lts& lts) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_aut(out, lts);
    if (!out) throw std::runtime_error("write failed: " + path);
}

Lts set_internal(const Lts& lts, const std::set<std::string>& labels) {
    for (const auto& name : labels)
        if (lts.actions.find(name) == npos) throw std::invalid_argument("unknown label: " + name);
    Lts out = lts;
    for (index_t i = 0; i < out.actions.size(); ++i) out.actions.internal[i] = labels.count(out.actions.labels[i]) > 0;
    return out;
}

}  // namespace branchmin
