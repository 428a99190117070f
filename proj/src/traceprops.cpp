#include "vispi/traceprops.hpp"

#include <algorithm>
#include <iterator>

namespace vispi {

bool isQuestion(const Action& a) { return a.isHO() && cls(a.subj) == NClass::Server; }
bool isAnswer(const Action& a) { return a.isHO() && cls(a.subj) == NClass::Cont; }

bool justifies(const Action& m1, const Action& m2) {
    if (!m1.isHO() || !m2.isHO() || m1.kind == m2.kind) return false;
    for (Name n : boundNames(m1))
        if (n == m2.subj) return true;
    return false;
}

int justifierOf(const Trace& t, size_t j) {
    for (size_t i = j; i-- > 0;)
        if (justifies(t[i], t[j])) return int(i);
    return -1;
}

NameSet fnHO(const Action& a) {
    NameSet o;
    if (!a.isHO()) return o;
    o.push_back(a.subj);
    for (Name n : boundNames(a)) o.push_back(n);
    return mkSet(o);
}

NameSet view(const NameSet& start, const Trace& t) {
    if (t.empty()) return start;
    // first-order actions carry no higher-order names and are transparent
    if (std::any_of(t.begin(), t.end(), [](const Action& a) { return !a.isHO(); })) {
        Trace ho;
        std::copy_if(t.begin(), t.end(), std::back_inserter(ho), [](const Action& a) { return a.isHO(); });
        return view(start, ho);
    }
    size_t n = t.size() - 1;
    int i = justifierOf(t, n);
    if (i < 0) return setUnion(start, fnHO(t[n]));
    Trace before(t.begin(), t.begin() + i);
    return setUnion(setUnion(view(start, before), fnHO(t[size_t(i)])), fnHO(t[n]));
}

int viewViolation(const NameSet& start, const Trace& t) {
    for (size_t i = 0; i < t.size(); ++i) {
        if (!t[i].isHO()) continue;
        NameSet v = i == 0 ? start : view(start, Trace(t.begin(), t.begin() + long(i)));
        if (!setHas(v, t[i].subj)) return int(i);
    }
    return -1;
}

bool respectsViews(const NameSet& start, const Trace& t) { return viewViolation(start, t) < 0; }

std::pair<int, int> bracketViolation(const Trace& t) {
    for (size_t i = 0; i < t.size(); ++i) {
        if (!isQuestion(t[i])) continue;
        for (size_t j = i + 1; j < t.size(); ++j) {
            if (!isAnswer(t[j])) continue;
            bool blocked = false;
            for (size_t k = i + 1; k < j && !blocked; ++k)
                if (justifies(t[i], t[k]) || justifies(t[k], t[j])) blocked = true;
            if (!blocked && !justifies(t[i], t[j])) return {int(i), int(j)};
        }
    }
    return {-1, -1};
}

bool wellBracketed(const Trace& t) { return bracketViolation(t).first < 0; }

}  // namespace vispi
