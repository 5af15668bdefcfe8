#pragma once

#include <iosfwd>
#include <string>

#include "normspec/session.hpp"

namespace normspec {

// JSON-lines service: one request object per input line, one response per
// line. Schema (v1):
//   {"v":1,"kind":"phrase","text":"+bidder(Alice)."}
//   {"v":1,"kind":"query","text":"Holds(user(Eve))",
//    "input":[{"instance":"user(Eve)","value":true}]}
//   {"v":1,"kind":"inspect-open-types"}
//   {"v":1,"kind":"revert","state":3}
// Additional input lives only for its own request. Open-type interrupts
// answer with a "missing" object naming the instance or type.
void serve(Session& session, std::istream& in, std::ostream& out);

// Handles one already-parsed request line; exposed for tests.
std::string serve_line(Session& session, const std::string& requestLine);

} // namespace normspec
