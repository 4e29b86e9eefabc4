#!/usr/bin/env python3
"""Regenerate the bundled weekly fixture series in crates/core/data/.

The fixtures are an approximate, down-sampled reconstruction of the public
blockchain.com chart series (market-price, transaction-fees, hash-rate),
built from roughly monthly anchor values and interpolated log-linearly onto a
7-day grid from day 0 (2009-01-03) to day 4100. They are good enough for the
offline test suite. For faithful runs fetch the full series with
`hashpeak fetch`.

Hash-rate anchors were derived from the difficulty history via
H [GH/s] = difficulty * 2^32 / 600 / 1e9.
"""

import datetime as dt
import math
from pathlib import Path

EPOCH = dt.date(2009, 1, 3)
LAST_DAY = 4100
STEP = 7

# (date, USD/BTC). Zero before the first exchange quotes.
PRICE = [
    ("2009-01-03", 0.0), ("2010-07-16", 0.0),
    ("2010-07-17", 0.05), ("2010-09-01", 0.06), ("2010-11-06", 0.39),
    ("2010-12-15", 0.23), ("2011-02-10", 1.0), ("2011-04-15", 1.0),
    ("2011-06-08", 29.0), ("2011-07-15", 13.5), ("2011-09-01", 8.0),
    ("2011-11-18", 2.1), ("2012-01-10", 6.8), ("2012-03-15", 5.0),
    ("2012-06-15", 6.5), ("2012-08-17", 13.0), ("2012-10-15", 12.0),
    ("2012-12-31", 13.5), ("2013-02-28", 33.0), ("2013-04-09", 230.0),
    ("2013-04-20", 120.0), ("2013-07-05", 70.0), ("2013-09-15", 130.0),
    ("2013-11-04", 230.0), ("2013-11-30", 1130.0), ("2013-12-18", 540.0),
    ("2014-01-05", 930.0), ("2014-02-25", 540.0), ("2014-04-10", 380.0),
    ("2014-06-01", 650.0), ("2014-08-15", 500.0), ("2014-10-05", 320.0),
    ("2014-12-01", 380.0), ("2015-01-14", 180.0), ("2015-03-15", 280.0),
    ("2015-06-15", 235.0), ("2015-08-15", 265.0), ("2015-11-04", 400.0),
    ("2015-12-31", 430.0), ("2016-03-15", 415.0), ("2016-06-17", 750.0),
    ("2016-08-02", 540.0), ("2016-10-15", 640.0), ("2016-12-31", 960.0),
    ("2017-03-01", 1190.0), ("2017-03-25", 930.0), ("2017-05-25", 2400.0),
    ("2017-07-15", 1950.0), ("2017-09-01", 4900.0), ("2017-09-15", 3300.0),
    ("2017-11-01", 6700.0), ("2017-12-17", 19300.0), ("2017-12-30", 13000.0),
    ("2018-02-06", 7000.0), ("2018-03-05", 11400.0), ("2018-04-06", 6600.0),
    ("2018-05-05", 9700.0), ("2018-06-29", 5900.0), ("2018-07-25", 8200.0),
    ("2018-09-15", 6500.0), ("2018-11-14", 5600.0), ("2018-11-25", 3900.0),
    ("2018-12-15", 3200.0), ("2019-01-15", 3600.0), ("2019-03-15", 3900.0),
    ("2019-04-15", 5100.0), ("2019-05-15", 8000.0), ("2019-06-26", 12900.0),
    ("2019-07-15", 10200.0), ("2019-08-15", 10300.0), ("2019-09-15", 10300.0),
    ("2019-10-01", 8300.0), ("2019-10-26", 9500.0), ("2019-12-17", 6600.0),
    ("2020-01-15", 8800.0), ("2020-02-13", 10300.0), ("2020-03-08", 8000.0),
    ("2020-03-12", 5000.0), ("2020-03-26", 6700.0),
]

# (date, BTC/day)
FEES = [
    ("2009-01-03", 0.0), ("2009-12-31", 0.0),
    ("2010-06-01", 0.05), ("2010-12-01", 0.4), ("2011-06-01", 4.0),
    ("2011-12-01", 6.0), ("2012-04-01", 15.0), ("2012-08-01", 40.0),
    ("2012-12-01", 35.0), ("2013-04-01", 45.0), ("2013-08-01", 30.0),
    ("2013-12-01", 20.0), ("2014-06-01", 14.0), ("2014-12-01", 13.0),
    ("2015-06-01", 18.0), ("2015-07-10", 40.0), ("2015-08-01", 22.0),
    ("2015-12-01", 28.0), ("2016-06-01", 55.0), ("2016-12-01", 75.0),
    ("2017-03-01", 140.0), ("2017-05-20", 700.0), ("2017-08-01", 250.0),
    ("2017-10-01", 300.0), ("2017-12-22", 1400.0), ("2018-01-10", 600.0),
    ("2018-02-15", 150.0), ("2018-03-15", 50.0), ("2018-06-01", 30.0),
    ("2018-09-01", 22.0), ("2018-12-01", 20.0), ("2019-03-01", 28.0),
    ("2019-05-15", 110.0), ("2019-06-25", 160.0), ("2019-08-01", 60.0),
    ("2019-10-01", 40.0), ("2019-12-01", 25.0), ("2020-02-15", 45.0),
    ("2020-03-26", 35.0),
]

# (date, GH/s)
HASH_RATE = [
    ("2009-01-03", 0.0049), ("2009-06-01", 0.006), ("2009-12-30", 0.0085),
    ("2010-02-15", 0.027), ("2010-04-15", 0.082), ("2010-06-15", 0.17),
    ("2010-07-20", 1.3), ("2010-08-25", 5.5), ("2010-10-20", 27.0),
    ("2010-12-15", 86.0), ("2011-02-15", 160.0), ("2011-04-15", 500.0),
    ("2011-06-15", 6300.0), ("2011-08-15", 13000.0), ("2011-10-15", 9000.0),
    ("2011-12-15", 8000.0), ("2012-03-15", 11000.0), ("2012-06-15", 12500.0),
    ("2012-09-15", 20000.0), ("2012-12-15", 23000.0), ("2013-02-15", 25000.0),
    ("2013-04-15", 55000.0), ("2013-06-15", 110000.0), ("2013-08-15", 360000.0),
    ("2013-10-15", 1.9e6), ("2013-12-15", 8.4e6), ("2014-02-15", 2.2e7),
    ("2014-04-15", 4.3e7), ("2014-06-15", 8.6e7), ("2014-08-15", 1.6e8),
    ("2014-10-15", 2.5e8), ("2014-12-15", 2.9e8), ("2015-06-15", 3.4e8),
    ("2015-09-15", 4.2e8), ("2015-12-15", 7.2e8), ("2016-03-15", 1.2e9),
    ("2016-06-15", 1.45e9), ("2016-09-15", 1.6e9), ("2016-12-15", 2.2e9),
    ("2017-03-15", 3.3e9), ("2017-06-15", 5.0e9), ("2017-09-15", 7.2e9),
    ("2017-12-15", 1.36e10), ("2018-03-15", 2.4e10), ("2018-06-15", 3.6e10),
    ("2018-08-15", 4.6e10), ("2018-10-25", 5.3e10), ("2018-12-15", 3.6e10),
    ("2019-02-15", 4.3e10), ("2019-04-15", 4.6e10), ("2019-06-15", 5.7e10),
    ("2019-08-15", 7.2e10), ("2019-10-15", 9.3e10), ("2019-12-15", 9.2e10),
    ("2020-02-15", 1.1e11), ("2020-03-08", 1.15e11), ("2020-03-26", 1.05e11),
]


def day(s):
    return (dt.date.fromisoformat(s) - EPOCH).days


def resample(anchors):
    pts = [(day(d), v) for d, v in anchors]
    out = []
    for t in list(range(0, LAST_DAY, STEP)) + [LAST_DAY]:
        for (d0, v0), (d1, v1) in zip(pts, pts[1:]):
            if d0 <= t <= d1:
                w = (t - d0) / (d1 - d0)
                if v0 > 0 and v1 > 0:
                    v = math.exp(math.log(v0) + w * (math.log(v1) - math.log(v0)))
                else:
                    v = v0 + w * (v1 - v0)
                out.append((t, v))
                break
        else:
            raise ValueError(f"day {t} not covered")
    return out


def write(name, anchors):
    path = Path(__file__).resolve().parent.parent / "crates" / "core" / "data" / name
    with open(path, "w") as f:
        f.write("day,value\n")
        for t, v in resample(anchors):
            f.write(f"{t},{float(f'{v:.6g}')!r}\n")


if __name__ == "__main__":
    write("market-price.csv", PRICE)
    write("transaction-fees.csv", FEES)
    write("hash-rate.csv", HASH_RATE)
