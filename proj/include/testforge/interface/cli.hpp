#pragma once

namespace testforge::interface {

/// Entry point of the `testforge` command. Returns 0 on success, 1 when
/// the command ran but the outcome is a failure (a non-accepted
/// submission, a failed synthesis), 2 on usage or input errors.
int cli_main(int argc, char** argv);

}  // namespace testforge::interface
