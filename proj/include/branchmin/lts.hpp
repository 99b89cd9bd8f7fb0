#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace branchmin {

using index_t = std::uint32_t;
inline constexpr index_t npos = std::numeric_limits<index_t>::max();

// Interned action labels. Every label flagged internal is treated as the
// single silent action by the algorithms.
struct ActionTable {
    std::vector<std::string> labels;
    std::vector<bool> internal;

    index_t size() const { return static_cast<index_t>(labels.size()); }
    index_t find(std::string_view name) const;
    index_t intern(std::string_view name, bool is_internal);
    bool is_internal(index_t label) const { return internal[label]; }
};

struct Transition {
    index_t src;
    index_t label;
    index_t tgt;

    friend auto operator<=>(const Transition&, const Transition&) = default;
};

// A normalized LTS: transitions sorted by (src, label, tgt) without duplicates.
struct Lts {
    index_t n = 1;
    index_t initial = 0;
    std::vector<Transition> transitions;
    ActionTable actions;

    std::size_t m() const { return transitions.size(); }
};

// Sort and deduplicate the transition list in place.
void normalize(Lts& lts);

// Semantic equality: same n and initial state, and the same set of
// (src, label name, tgt, internal) tuples. Label indices may differ.
bool same_lts(const Lts& a, const Lts& b);

// Per original state, its representative in a derived LTS, or npos.
struct StateMap {
    std::vector<index_t> map;

    static StateMap identity(index_t n);
    // this: A -> B, next: B -> C; result: A -> C
    StateMap then(const StateMap& next) const;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

bool is_default_internal(std::string_view label);

Lts parse_aut(std::istream& in);
Lts parse_aut(std::string_view text);
Lts read_aut_file(const std::string& path);

void write_aut(std::ostream& out, const Lts& lts);
std::string write_aut(const Lts& lts);
void write_aut_file(const std::string& path, const Lts& lts);

// Replace the internal set by exactly the given label names.
Lts set_internal(const Lts& lts, const std::set<std::string>& labels);

}  // namespace branchmin
