#include "netmom/log.hpp"

#include <atomic>
#include <cstdlib>
#include <mutex>

namespace netmom::log {

namespace {

Level parse_env() {
    const char* env = std::getenv("NETMOM_LOG");
    if (!env) return Level::Warn;
    std::string s(env);
    if (s == "error") return Level::Error;
    if (s == "warn") return Level::Warn;
    if (s == "info") return Level::Info;
    if (s == "debug") return Level::Debug;
    return Level::Warn;
}

std::atomic<int> g_threshold{static_cast<int>(parse_env())};
std::mutex g_mutex;

const char* tag(Level lv) {
    switch (lv) {
        case Level::Error: return "error";
        case Level::Warn: return "warn";
        case Level::Info: return "info";
        case Level::Debug: return "debug";
    }
    return "?";
}

}  // namespace

Level threshold() { return static_cast<Level>(g_threshold.load()); }

void set_threshold(Level lv) { g_threshold.store(static_cast<int>(lv)); }

void emit(Level lv, const std::string& msg) {
    if (static_cast<int>(lv) > g_threshold.load()) return;
    std::lock_guard<std::mutex> lock(g_mutex);
    std::cerr << "[netmom][" << tag(lv) << "] " << msg << "\n";
}

}  // namespace netmom::log
