#pragma once

#include <functional>
#include <string>

namespace hom {

using WarningHandler = std::function<void(const std::string&)>;

/// Routes library warnings. The default handler writes to std::clog.
/// Returns the previous handler.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(const std::string& message);

}  // namespace hom
