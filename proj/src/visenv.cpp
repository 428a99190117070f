#include "vispi/visenv.hpp"

#include <algorithm>
#include <cctype>

namespace vispi {

NameSet mkSet(std::vector<Name> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

bool setHas(const NameSet& s, Name a) { return std::binary_search(s.begin(), s.end(), a); }

NameSet setUnion(const NameSet& a, const NameSet& b) {
    NameSet o;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(o));
    return o;
}

NameSet setIntersect(const NameSet& a, const NameSet& b) {
    NameSet o;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(o));
    return o;
}

NameSet setInsert(NameSet s, Name a) {
    auto it = std::lower_bound(s.begin(), s.end(), a);
    if (it == s.end() || *it != a) s.insert(it, a);
    return s;
}

NameSet setErase(NameSet s, Name a) {
    auto it = std::lower_bound(s.begin(), s.end(), a);
    if (it != s.end() && *it == a) s.erase(it);
    return s;
}

bool setSubset(const NameSet& a, const NameSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

std::string showSet(const NameSet& s) {
    std::vector<std::string> parts;
    for (Name a : s) parts.push_back(str(a));
    std::sort(parts.begin(), parts.end());
    std::string o = "{";
    for (size_t i = 0; i < parts.size(); ++i) o += (i ? "," : "") + parts[i];
    return o + "}";
}

const NameSet& VisEnv::at(Name a) const {
    static const NameSet empty;
    auto it = m.find(a);
    return it == m.end() ? empty : it->second;
}

NameSet VisEnv::dom() const {
    NameSet o;
    for (auto& [k, _] : m) o.push_back(k);
    return o;
}

NameSet VisEnv::ranUnion() const {
    NameSet o;
    for (auto& [_, v] : m) o = setUnion(o, v);
    return o;
}

std::string VisEnv::show() const {
    // print by spelling so output does not depend on interning order
    std::vector<std::pair<std::string, std::string>> rows;
    for (auto& [k, v] : m) rows.emplace_back(k == kStar ? std::string("*") : str(k), showSet(v));
    std::sort(rows.begin(), rows.end(), [](auto& x, auto& y) {
        if ((x.first == "*") != (y.first == "*")) return x.first == "*";
        return x < y;
    });
    std::string o = "{";
    for (size_t i = 0; i < rows.size(); ++i) o += (i ? "; " : " ") + rows[i].first + ": " + rows[i].second;
    return o + (rows.empty() ? "}" : " }");
}

VisEnv extend(const VisEnv& d, Name p, NameSet v) {
    if (d.has(p)) throw Error("extend: " + str(p) + " already in domain");
    VisEnv o = d;
    o.m.emplace(p, mkSet(std::move(v)));
    return o;
}

VisEnv assign(const VisEnv& d, Name p, NameSet v) {
    VisEnv o = d;
    o.m[p] = mkSet(std::move(v));
    return o;
}

VisEnv restrict(const VisEnv& d, Name p) {
    VisEnv o;
    for (auto& [k, v] : d.m)
        if (k != p) o.m.emplace(k, setErase(v, p));
    return o;
}

VisEnv addTo(const VisEnv& d, Name p, Name q) {
    VisEnv o = d;
    o.m[p] = setInsert(o.m[p], q);
    return o;
}

std::optional<TransWitness> transitivityViolation(const VisEnv& d) {
    for (auto& [o, vs] : d.m)
        for (Name a : vs) {
            auto it = d.m.find(a);
            if (it != d.m.end() && !setSubset(it->second, vs)) return TransWitness{o, a};
        }
    return std::nullopt;
}

bool checkTransitive(const VisEnv& d) { return !transitivityViolation(d); }

VisEnv transitiveClosure(const VisEnv& d) {
    VisEnv o = d;
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& [k, vs] : o.m) {
            NameSet acc = vs;
            for (Name a : vs) {
                auto it = o.m.find(a);
                if (it != o.m.end()) acc = setUnion(acc, it->second);
            }
            if (acc.size() != vs.size()) {
                vs = std::move(acc);
                changed = true;
            }
        }
    }
    return o;
}

VisEnv unionEnv(const VisEnv& a, const VisEnv& b) {
    VisEnv o = a;
    for (auto& [k, v] : b.m) o.m[k] = setUnion(o.m[k], v);
    return o;
}

VisEnv intersectEnv(const VisEnv& a, const VisEnv& b) {
    VisEnv o;
    for (auto& [k, v] : a.m) {
        auto it = b.m.find(k);
        if (it != b.m.end()) o.m.emplace(k, setIntersect(v, it->second));
    }
    return o;
}

bool subsetOf(const VisEnv& a, const VisEnv& b) {
    for (auto& [k, v] : a.m) {
        auto it = b.m.find(k);
        if (it == b.m.end() || !setSubset(v, it->second)) return false;
    }
    return true;
}

bool duplicable(const VisEnv& d) {
    for (auto& [k, _] : d.m)
        if (k == kStar || cls(k) != NClass::Server) return false;
    return true;
}

VisEnv projection(const NameSet& n, const VisEnv& th) {
    VisEnv o;
    for (auto& [k, v] : th.m)
        if (setHas(n, k)) o.m.emplace(k, setIntersect(v, n));
    return o;
}

std::vector<std::pair<VisEnv, VisEnv>> split(const VisEnv& d, Mode m) {
    std::vector<std::pair<Name, const NameSet*>> entries;
    for (auto& [k, v] : d.m) entries.emplace_back(k, &v);
    std::vector<std::pair<VisEnv, VisEnv>> out;
    std::vector<int> choice(entries.size(), 0);
    auto linear = [&](Name k) { return k == kStar || (m == Mode::WB && cls(k) == NClass::Cont); };
    while (true) {
        VisEnv l, r;
        for (size_t i = 0; i < entries.size(); ++i) {
            auto [k, v] = entries[i];
            if (choice[i] != 1) l.m.emplace(k, *v);
            if (choice[i] != 0) r.m.emplace(k, *v);
        }
        out.emplace_back(std::move(l), std::move(r));
        // 0 = left, 1 = right, 2 = both
        size_t i = 0;
        for (; i < entries.size(); ++i) {
            int lim = linear(entries[i].first) ? 2 : 3;
            if (++choice[i] < lim) break;
            choice[i] = 0;
        }
        if (i == entries.size()) break;
    }
    return out;
}

Stack push(const Stack& s, StackElem e) {
    Stack o;
    o.reserve(s.size() + 1);
    o.push_back(e);
    o.insert(o.end(), s.begin(), s.end());
    return o;
}

bool isStack(const Stack& s) {
    for (size_t i = 0; i + 1 < s.size(); ++i)
        if (s[i].out == s[i + 1].out) return false;
    for (size_t i = 0; i < s.size(); ++i)
        for (size_t j = i + 1; j < s.size(); ++j) {
            if (s[i].n != s[j].n) continue;
            if (s[i].out == s[j].out) return false;
            // both tags: input right after output
            if (!(s[i].out && !s[j].out && j == i + 1)) return false;
        }
    return true;
}

bool isClean(const Stack& s) {
    for (size_t i = 0; i < s.size(); ++i)
        for (size_t j = i + 1; j < s.size(); ++j)
            if (s[i].n == s[j].n) return false;
    return true;
}

bool stackHas(const Stack& s, Name p) {
    return std::any_of(s.begin(), s.end(), [&](auto& e) { return e.n == p; });
}

bool stackHasTagged(const Stack& s, StackElem e) { return std::find(s.begin(), s.end(), e) != s.end(); }

bool isInterleaving(const Stack& s, const Stack& s1, const Stack& s2) {
    if (!isStack(s)) return false;
    for (auto& e : s1)
        if (stackHasTagged(s2, e)) return false;
    if (s.size() != s1.size() + s2.size()) return false;
    // can s[0..i+j) be a merge of s1[0..i) and s2[0..j)
    std::vector<std::vector<char>> ok(s1.size() + 1, std::vector<char>(s2.size() + 1, 0));
    ok[0][0] = 1;
    for (size_t i = 0; i <= s1.size(); ++i)
        for (size_t j = 0; j <= s2.size(); ++j) {
            if (!ok[i][j]) continue;
            if (i < s1.size() && s1[i] == s[i + j]) ok[i + 1][j] = 1;
            if (j < s2.size() && s2[j] == s[i + j]) ok[i][j + 1] = 1;
        }
    return ok[s1.size()][s2.size()];
}

std::vector<std::pair<Stack, Stack>> interleavings(const Stack& s) {
    std::vector<std::pair<Stack, Stack>> out;
    if (!isStack(s)) return out;
    size_t n = s.size();
    for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
        Stack l, r;
        for (size_t i = 0; i < n; ++i) ((mask >> i) & 1 ? r : l).push_back(s[i]);
        if (isStack(l) && isStack(r)) out.emplace_back(std::move(l), std::move(r));
    }
    return out;
}

std::string showStack(const Stack& s) {
    std::string o = "[";
    for (size_t i = 0; i < s.size(); ++i) o += (i ? ", " : "") + str(s[i].n) + (s[i].out ? "!" : "?");
    return o + "]";
}

std::string TypingEnv::show() const {
    std::string o = "vis " + vis.show();
    if (!stack.empty()) o += " stack " + showStack(stack);
    return o;
}

namespace {

struct EnvLexer {
    const std::string& t;
    const Decls& d;
    size_t i = 0;

    void ws() {
        while (i < t.size()) {
            if (std::isspace((unsigned char)t[i])) {
                ++i;
            } else if (t[i] == '#' || (t[i] == '/' && i + 1 < t.size() && t[i + 1] == '/')) {
                while (i < t.size() && t[i] != '\n') ++i;
            } else {
                break;
            }
        }
    }
    [[noreturn]] void fail(const std::string& m) {
        size_t line = 1 + size_t(std::count(t.begin(), t.begin() + long(std::min(i, t.size())), '\n'));
        throw Error("environment syntax error at line " + std::to_string(line) + ": " + m);
    }
    bool peek(char c) {
        ws();
        return i < t.size() && t[i] == c;
    }
    void expect(char c) {
        if (!peek(c)) fail(std::string("expected '") + c + "'");
        ++i;
    }
    bool atEnd() {
        ws();
        return i >= t.size();
    }
    std::string word() {
        ws();
        size_t j = i;
        while (j < t.size() && (std::isalnum((unsigned char)t[j]) || t[j] == '_' || t[j] == '\'')) ++j;
        if (j == i) fail("expected identifier");
        std::string w = t.substr(i, j - i);
        i = j;
        return w;
    }
    bool peekWord(const std::string& w) {
        ws();
        return t.compare(i, w.size(), w) == 0 &&
               (i + w.size() >= t.size() || !std::isalnum((unsigned char)t[i + w.size()]));
    }
    Name name() {
        std::string w = word();
        auto it = d.classes.find(w);
        if (it != d.classes.end()) {
            if (it->second != NClass::Server && it->second != NClass::Cont)
                fail("'" + w + "' is not a higher-order name");
            return intern(w, it->second);
        }
        if (isReservedSpelling(w)) return intern(w, w[0] == 'p' ? NClass::Cont : NClass::Server);
        fail("undeclared name '" + w + "'");
    }
    NameSet nameSet() {
        expect('{');
        std::vector<Name> v;
        while (!peek('}')) {
            v.push_back(name());
            if (peek(',')) ++i;
        }
        expect('}');
        return mkSet(v);
    }
    VisEnv vis() {
        expect('{');
        VisEnv e;
        while (!peek('}')) {
            Name k;
            if (peek('*')) {
                ++i;
                k = kStar;
            } else {
                k = name();
            }
            expect(':');
            NameSet v = nameSet();
            if (e.has(k)) fail("duplicate entry for " + str(k));
            e.m.emplace(k, v);
            if (peek(';') || peek(',')) ++i;
        }
        expect('}');
        return e;
    }
    Stack stack() {
        expect('[');
        Stack s;
        while (!peek(']')) {
            Name p = name();
            if (cls(p) != NClass::Cont) fail("stack entries must be continuation names");
            if (peek('!')) {
                ++i;
                s.push_back(sOut(p));
            } else if (peek('?')) {
                ++i;
                s.push_back(sIn(p));
            } else {
                fail("stack entry needs a tag ! or ?");
            }
            if (peek(',')) ++i;
        }
        expect(']');
        if (!isStack(s)) fail("not a valid stack: " + showStack(s));
        return s;
    }
    TypingEnv env() {
        TypingEnv te;
        if (peekWord("vis")) {
            word();
            te.vis = vis();
        }
        if (peekWord("stack")) {
            word();
            te.stack = stack();
        }
        return te;
    }
};

}  // namespace

VisEnv parseVis(const std::string& text, const Decls& d) {
    EnvLexer lx{text, d};
    if (lx.peekWord("vis")) lx.word();
    VisEnv v = lx.vis();
    if (!lx.atEnd()) lx.fail("trailing input");
    return v;
}

Stack parseStack(const std::string& text, const Decls& d) {
    EnvLexer lx{text, d};
    if (lx.peekWord("stack")) lx.word();
    Stack s = lx.stack();
    if (!lx.atEnd()) lx.fail("trailing input");
    return s;
}

EnvFile parseEnvFile(const std::string& text, const Decls& d) {
    EnvLexer lx{text, d};
    EnvFile f;
    bool seenP = false, seenO = false;
    while (!lx.atEnd()) {
        std::string w = lx.word();
        if (w == "player") {
            if (seenP) lx.fail("duplicate player section");
            seenP = true;
            f.player = lx.env();
        } else if (w == "observer") {
            if (seenO) lx.fail("duplicate observer section");
            seenO = true;
            f.observer = lx.env();
        } else {
            lx.fail("expected 'player' or 'observer'");
        }
        lx.expect(';');
    }
    f.hasObserver = seenO;
    return f;
}

std::vector<TypingEnv> parseEnvFamily(const std::string& text, const Decls& d) {
    EnvLexer lx{text, d};
    std::vector<TypingEnv> out;
    while (!lx.atEnd()) {
        if (!lx.peekWord("vis") && !lx.peekWord("stack")) lx.fail("expected 'vis' or 'stack'");
        out.push_back(lx.env());
        if (lx.peek(';')) lx.expect(';');
    }
    return out;
}

}  // namespace vispi
