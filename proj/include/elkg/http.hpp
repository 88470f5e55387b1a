#pragma once

// Single entry point for the vendored HTTP library so every translation unit
// sees the same configuration.

// The library default of 5 refuses bursts of concurrent clients.
#ifndef CPPHTTPLIB_LISTEN_BACKLOG
#define CPPHTTPLIB_LISTEN_BACKLOG 128
#endif

#include <httplib.h>
