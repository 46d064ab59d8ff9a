#ifndef HOLOPNT_VERSION_HPP
#define HOLOPNT_VERSION_HPP

#define HOLOPNT_VERSION "0.1.0"
#define HOLOPNT_REPORT_SCHEMA "holopnt-report/1"

#endif
