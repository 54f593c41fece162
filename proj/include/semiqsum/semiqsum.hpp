#pragma once

#include "semiqsum/random_stream.hpp"
#include "semiqsum/rational.hpp"
#include "semiqsum/quantum.hpp"
#include "semiqsum/transcript.hpp"
#include "semiqsum/protocol.hpp"
#include "semiqsum/roles.hpp"
#include "semiqsum/session.hpp"
#include "semiqsum/adversary.hpp"
#include "semiqsum/analysis.hpp"
#include "semiqsum/report.hpp"
