#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sspbound::frontend {

struct SourceLoc {
  int line = 1;
  int col = 1;
  friend bool operator==(const SourceLoc&, const SourceLoc&) = default;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string message;
  SourceLoc loc;

  std::string str() const {
    std::ostringstream os;
    os << loc.line << ":" << loc.col << ": " << (severity == Severity::Error ? "error" : "warning") << ": "
       << message;
    return os.str();
  }
};

/// Thrown by the frontend stages; carries every error found by the stage.
class DiagnosticError : public std::runtime_error {
 public:
  explicit DiagnosticError(std::vector<Diagnostic> diags)
      : std::runtime_error(diags.empty() ? "frontend error" : diags.front().str()), diags_(std::move(diags)) {}

  const std::vector<Diagnostic>& diagnostics() const { return diags_; }

 private:
  std::vector<Diagnostic> diags_;
};

}  // namespace sspbound::frontend
