#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "vispi/equiv.hpp"
#include "vispi/typecheck.hpp"
#include "vispi/typedlts.hpp"

namespace th {

inline std::string slurp(const std::string& name) {
    std::ifstream in(std::string(VISPI_DATA_DIR) + "/" + name);
    if (!in) throw std::runtime_error("missing data file " + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline vispi::ProcFile procFile(const std::string& name) { return vispi::parseFile(slurp(name)); }

inline vispi::EnvFile envFile(const std::string& name, const vispi::Decls& d) {
    return vispi::parseEnvFile(slurp(name), d);
}

// a single process from a header and a term
inline vispi::ProcP term(const std::string& header, const std::string& t) {
    return vispi::parseFile(header + "\nproc P = " + t + ";").get("P");
}

inline vispi::Decls decls(const std::string& header) { return vispi::parseFile(header).decls; }

inline vispi::TypingEnv env(const std::string& vis, const vispi::Decls& d, const std::string& stack = "") {
    vispi::TypingEnv e;
    e.vis = vispi::parseVis(vis, d);
    if (!stack.empty()) e.stack = vispi::parseStack(stack, d);
    return e;
}

inline std::set<std::string> keys(const vispi::TraceSet& ts) {
    auto k = ts.keys();
    return {k.begin(), k.end()};
}

inline const std::vector<vispi::Value>& vals012() {
    static std::vector<vispi::Value> v{vispi::Value::integer(0), vispi::Value::integer(1), vispi::Value::integer(2)};
    return v;
}

inline std::set<std::string> actions(const std::vector<vispi::Step>& steps) {
    std::set<std::string> o;
    for (auto& s : steps) o.insert(vispi::showAction(s.act));
    return o;
}

}  // namespace th
