#pragma once

namespace numline {

/// Command-line entry point. Returns the process exit status: 0 on success,
/// nonzero with a structured message on stderr otherwise. Output files are
/// written atomically, and every file-producing run drops a
/// <out>.manifest.json with the fully resolved configuration.
int dispatch(int argc, const char* const* argv);

}  // namespace numline
