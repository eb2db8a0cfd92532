#pragma once

#include <stdexcept>
#include <string>

namespace hfent {

// All library errors derive from Error so the CLI can map them to exit codes.
// The category tags match the failure classes the API documents:
//   structural  - malformed inputs (bad incidence, dimension mismatch, ...)
//   domain      - precondition violated (non-closed cochain, wrong group, ...)
//   capability  - request exceeds configured caps (enumeration, dimension)
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& what)
        : std::runtime_error(category + ": " + what), category_(std::move(category)) {}
    const std::string& category() const { return category_; }

private:
    std::string category_;
};

inline Error structural_error(const std::string& what) { return Error("structural", what); }
inline Error domain_error(const std::string& what) { return Error("domain", what); }
inline Error capability_error(const std::string& what) { return Error("capability", what); }

}  // namespace hfent
