#ifndef PGP_PDDL_H
#define PGP_PDDL_H

#include "strips.h"

#include <filesystem>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pgp {
struct ParseDiagnostic {
    enum class Severity { Error, Warning };

    std::string file;
    int line = 0;
    int column = 0;
    std::string message;
    Severity severity = Severity::Error;

    // "file:line:col: error: message"
    std::string str() const;
};

class ParseError : public std::runtime_error {
public:
    explicit ParseError(ParseDiagnostic diagnostic)
        : std::runtime_error(diagnostic.str()), diagnostic_(std::move(diagnostic)) {
    }
    const ParseDiagnostic &diagnostic() const { return diagnostic_; }

private:
    ParseDiagnostic diagnostic_;
};

// Only the STRIPS fragment with typing is accepted. Symbols are lower-cased.
std::shared_ptr<DomainModel> parse_domain(std::string_view text,
                                          std::string_view file = "<domain>");
Instance parse_problem(std::string_view text, std::shared_ptr<const DomainModel> domain,
                       std::string_view file = "<problem>");

std::shared_ptr<DomainModel> load_domain(const std::filesystem::path &path);
Instance load_problem(const std::filesystem::path &path,
                      std::shared_ptr<const DomainModel> domain);

std::string format_domain(const DomainModel &domain);
std::string format_problem(const Instance &instance);

// One "(name o1 o2)" line per action.
std::string format_plan(const Instance &instance, std::span<const GroundAction> plan);
std::vector<GroundAction> parse_plan(std::string_view text, const Instance &instance);

std::string read_text_file(const std::filesystem::path &path);
}

#endif
