#pragma once

#define NSUM_VERSION "0.1.0"
