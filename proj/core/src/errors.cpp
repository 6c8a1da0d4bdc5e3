#include "reachmax/errors.hpp"

#include <sstream>

namespace reachmax {

namespace {

std::string singular_message(std::size_t column, double pivot)
{
    std::ostringstream os;
    os << "singular matrix: pivot " << pivot << " at column " << column;
    return os.str();
}

std::string convergence_message(std::size_t iterations, double residual)
{
    std::ostringstream os;
    os << "power iteration did not converge after " << iterations
       << " iterations (last residual " << residual << ")";
    return os.str();
}

std::string line_message(std::size_t line, const std::string& message)
{
    if (line == 0) {
        return message;
    }
    return "line " + std::to_string(line) + ": " + message;
}

}  // namespace

SingularMatrix::SingularMatrix(std::size_t column, double pivot)
    : std::runtime_error(singular_message(column, pivot)), column_(column), pivot_(pivot)
{
}

NonConvergence::NonConvergence(std::size_t iterations, double residual)
    : std::runtime_error(convergence_message(iterations, residual)),
      iterations_(iterations),
      residual_(residual)
{
}

ParseError::ParseError(std::size_t line, const std::string& message)
    : std::runtime_error(line_message(line, message)), line_(line)
{
}

}  // namespace reachmax
