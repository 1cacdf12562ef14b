#pragma once

#include "jrsim/config.hpp"

namespace jrsim {

/// Table-default scenario: 4 BSs, 10 subcarriers of 20 kHz, 40 W per BS,
/// -170 dBm/Hz noise, 1000 m square, 4 servers with 6 VMs each, the six-VNF
/// catalog and three SFCs, 8 users assigned round-robin.
NetworkConfig builtin_config();

/// Reference tiny instance: J=1, U=2, K=2, two servers with two VMs each,
/// chains of length 2. Small enough for exhaustive search, and tuned so the
/// capacity and delay constraints bind: the two users cannot share a server
/// and a chain split across servers pays the link transfer twice.
NetworkConfig tiny_config();

}  // namespace jrsim
