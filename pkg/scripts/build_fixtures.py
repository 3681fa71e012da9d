"""Regenerate the bundled GDP fixtures in src/growthscope/data/.

Needs ``statsmodels`` and ``rdatasets`` (neither is a runtime dependency).

quarterly.csv
    Real US GDP per capita, 1947Q1-2015Q4, chained 2009 dollars.  Real GDP is
    chain-linked from three vintages, each rescaled to continue the next:
    BEA GDPC1 (chained 2009 $, July 2016 vintage, shipped with the statsmodels
    FRBNY nowcast test data) from 1985Q1, statsmodels ``macrodata`` realgdp
    (chained 2005 $) for 1959Q1-1984Q4 and AER ``USMacroSWQ`` gdp
    (chained 2000 $) for 1947Q1-1958Q4.  Population is the Census annual
    resident population (Ecdat ``USGDPpresidents``) interpolated log-linearly
    to quarter midpoints.

annual.csv
    Real US GDP per capita, 1800-2010, 2012 dollars (MeasuringWorth, via Ecdat
    ``USGDPpresidents``).
"""
from pathlib import Path

import numpy as np
import pandas as pd
import rdatasets
import statsmodels
import statsmodels.api as sm

OUT = Path(__file__).resolve().parents[1] / "src" / "growthscope" / "data"
FRBNY = (Path(statsmodels.__file__).parent / "tsa" / "statespace" / "tests" / "results"
         / "frbny_nowcast" / "Nowcasting" / "data" / "US" / "2016-07-29.csv")


def quarterly():
    raw = pd.read_csv(FRBNY)[["Date", "GDPC1"]].dropna()
    when = pd.to_datetime(raw.Date, format="%m/%d/%y")
    gdpc1 = pd.Series(raw.GDPC1.values, index=when.dt.year + (when.dt.month // 3 - 1) * 0.25)

    mac = sm.datasets.macrodata.load_pandas().data
    mac = pd.Series(mac.realgdp.values, index=mac.year + (mac.quarter - 1) * 0.25)
    swq = rdatasets.data("AER", "USMacroSWQ").gdp.values
    swq = pd.Series(swq, index=1947 + np.arange(len(swq)) * 0.25)

    mid = mac.loc[:1984.75] * gdpc1[1985.0] / mac[1985.0]
    early = swq.loc[:1958.75] * mid[1959.0] / swq[1959.0]
    gdp = pd.concat([early, mid, gdpc1.loc[1985.0:2015.75]])  # billions

    pres = rdatasets.data("Ecdat", "USGDPpresidents").set_index("Year")
    pop = pres["population.K"].loc[1946:2017].astype(float)  # thousands, mid-year
    t = gdp.index.values
    popq = np.exp(np.interp(t + 0.125, pop.index.values + 0.5, np.log(pop.values)))
    per_capita = gdp.values * 1e6 / popq

    lines = ["date,value"]
    for ti, v in zip(t, per_capita):
        year, q = int(ti), int(round((ti - int(ti)) * 4)) + 1
        lines.append(f"{year}Q{q},{v:.1f}")
    (OUT / "quarterly.csv").write_text("\n".join(lines) + "\n")


def annual():
    pres = rdatasets.data("Ecdat", "USGDPpresidents").set_index("Year")
    gdp = pres["realGDPperCapita"].loc[1800:2010]
    lines = ["date,value"] + [f"{y},{int(v)}" for y, v in gdp.items()]
    (OUT / "annual.csv").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    quarterly()
    annual()
