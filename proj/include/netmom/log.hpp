#pragma once

#include <iostream>
#include <sstream>
#include <string>

namespace netmom::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Reads NETMOM_LOG once (error|warn|info|debug); default warn.
Level threshold();
void set_threshold(Level lv);

void emit(Level lv, const std::string& msg);

inline void error(const std::string& msg) { emit(Level::Error, msg); }
inline void warn(const std::string& msg) { emit(Level::Warn, msg); }
inline void info(const std::string& msg) { emit(Level::Info, msg); }
inline void debug(const std::string& msg) { emit(Level::Debug, msg); }

}  // namespace netmom::log
