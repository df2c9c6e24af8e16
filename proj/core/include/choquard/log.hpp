#pragma once

#include <functional>
#include <string>

namespace choquard {

using WarningSink = std::function<void(const std::string&)>;

/// Route library warnings (cache rebuilds, accuracy notices). The default sink
/// writes "warning: ..." lines to std::clog. Returns the previous sink.
WarningSink set_warning_sink(WarningSink sink);

void warn(const std::string& message);

}  // namespace choquard
