#pragma once
// Minimal stderr logger. Level comes from the SCHEMAGRAPH_LOG environment
// variable: debug | info | warn | error | off (default: warn).

#include <cstdio>
#include <cstdlib>
#include <string>
#include <string_view>

namespace schemaqa::log {

enum class Level { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

inline Level level_from_env() {
    const char* raw = std::getenv("SCHEMAGRAPH_LOG");
    if (raw == nullptr) return Level::warn;
    std::string v(raw);
    for (auto& c : v) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (v == "debug") return Level::debug;
    if (v == "info") return Level::info;
    if (v == "warn" || v == "warning") return Level::warn;
    if (v == "error") return Level::error;
    if (v == "off" || v == "none") return Level::off;
    return Level::warn;
}

inline Level& threshold() {
    static Level lvl = level_from_env();
    return lvl;
}

inline void emit(Level lvl, std::string_view tag, std::string_view msg) {
    if (lvl < threshold()) return;
    std::fprintf(stderr, "[%.*s] %.*s\n", static_cast<int>(tag.size()), tag.data(),
                 static_cast<int>(msg.size()), msg.data());
}

inline void debug(std::string_view msg) { emit(Level::debug, "debug", msg); }
inline void info(std::string_view msg) { emit(Level::info, "info", msg); }
inline void warn(std::string_view msg) { emit(Level::warn, "warn", msg); }
inline void error(std::string_view msg) { emit(Level::error, "error", msg); }

}  // namespace schemaqa::log
