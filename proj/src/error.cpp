#include "thz/error.hpp"

namespace thz {

const char* error_code(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::Format: return "E_FORMAT";
    case ErrorKind::Corruption: return "E_CORRUPT";
    case ErrorKind::Validation: return "E_VALIDATION";
    case ErrorKind::Configuration: return "E_CONFIG";
    case ErrorKind::Domain: return "E_DOMAIN";
    case ErrorKind::Io: return "E_IO";
    }
    return "E_UNKNOWN";
}

} // namespace thz

#include <cstdio>

#include "thz/digest.hpp"

namespace thz {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace thz
