//! gnuplot scripts next to the data they plot.

pub fn gamma_script(csv: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set title 'Cooperative decay rate'\n\
         set xlabel 'R / l_c'\n\
         set ylabel 'Gamma / Gamma_inf'\n\
         set grid\n\
         plot '{csv}' using 2:5 with linespoints pt 7 title 'Gamma(R)/Gamma_inf'\n"
    )
}

pub fn decay_script(csv: &str, rate: f64, peak: f64, r_over_lc: f64) -> String {
    format!(
        "set datafile separator ','\n\
         set title 'F(tau), R/l_c = {r_over_lc}'\n\
         set xlabel 'tau (ps)'\n\
         set ylabel 'coincidences'\n\
         set logscale y\n\
         set grid\n\
         gamma_ps = {gamma_ps:e}\n\
         peak = {peak:e}\n\
         plot '{csv}' using ($2*1e12):3 with points pt 7 ps 0.3 title 'MCA', \\\n\
         \x20    peak*exp(-gamma_ps*abs(x)) with lines dt 2 title sprintf('fit, Gamma = %.3f ps^-1', gamma_ps)\n",
        gamma_ps = rate * 1e-12,
    )
}

pub fn partition_script(csv: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set title 'Two-photon partition over k, k'''\n\
         set xlabel 'R / l_c'\n\
         set ylabel 'probability'\n\
         set logscale x\n\
         set yrange [0:1]\n\
         set grid\n\
         plot '{csv}' using 1:2 with linespoints title 'P(2,0)', \\\n\
         \x20    '{csv}' using 1:3 with linespoints title 'P(1,1)', \\\n\
         \x20    0.5 dt 2 title 'Bose-Einstein', 1.0/3 dt 3 title 'Maxwell-Boltzmann P(2,0)', 2.0/3 dt 3 title 'Maxwell-Boltzmann P(1,1)'\n"
    )
}
