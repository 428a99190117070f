#include "vispi/syntax.hpp"

#include <deque>
#include <mutex>
#include <unordered_map>

namespace vispi {

namespace {

struct Table {
    std::mutex mu;
    std::deque<std::string> strs;
    std::deque<NClass> classes;
    std::unordered_map<std::string, Name> idx;
};

Table& table() {
    static Table t;
    return t;
}

}  // namespace

Name intern(const std::string& s, NClass c) {
    auto& t = table();
    std::lock_guard lk(t.mu);
    std::string key = s;
    key.push_back('\x01');
    key.push_back(char('0' + int(c)));
    auto it = t.idx.find(key);
    if (it != t.idx.end()) return it->second;
    Name n = Name(t.strs.size());
    t.strs.push_back(s);
    t.classes.push_back(c);
    t.idx.emplace(std::move(key), n);
    return n;
}

const std::string& str(Name n) {
    static const std::string star = "*";
    static const std::string none = "?";
    if (n == kStar) return star;
    if (n < 0) return none;
    return table().strs[size_t(n)];
}

// reads are lock-free; entries never move once interned
NClass cls(Name n) {
    return table().classes[size_t(n)];
}

const char* className(NClass c) {
    switch (c) {
        case NClass::Server: return "ho";
        case NClass::Cont: return "con";
        case NClass::FO: return "fo";
        case NClass::Succ: return "succ";
        case NClass::Var: return "var";
    }
    return "?";
}

Name traceName(int k, NClass c) {
    return intern((c == NClass::Cont ? "p" : "b") + std::to_string(k), c);
}

bool isReservedSpelling(const std::string& s) {
    if (s.size() < 2 || (s[0] != 'b' && s[0] != 'p')) return false;
    for (size_t i = 1; i < s.size(); ++i)
        if (s[i] < '0' || s[i] > '9') return false;
    return true;
}

Name freshFor(const std::set<Name>& avoid, const std::string& stem, NClass c) {
    for (int k = 1;; ++k) {
        Name n = intern(stem + std::to_string(k), c);
        if (!avoid.count(n)) return n;
    }
}

}  // namespace vispi
