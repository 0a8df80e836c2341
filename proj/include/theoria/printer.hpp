#pragma once

#include <string>

#include "theoria/formula.hpp"

namespace theoria {

// Unicode renders infix extension operators with their declared symbol; Ascii
// renders them by name. Core operators print the same in both modes.
enum class PrintMode { Ascii, Unicode };

std::string print_formula(const Formula& f, PrintMode mode = PrintMode::Unicode);

}  // namespace theoria
